//! The HTTP API driven in-process: scene, simulation, image, FWHM query.
//!
//! Requests go straight to the router without a socket; `sarlab serve`
//! exposes the same router over HTTP.
//!
//! ```text
//! cargo run --release --example http_service
//! ```

use axum::body::Body;
use axum::http::{Request, StatusCode};
use http_body_util::BodyExt;
use sarlab::io::SceneDocument;
use sarlab::service::{router, AppState, ServiceConfig};
use serde_json::{json, Value};
use tower::ServiceExt;

async fn call(app: &axum::Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let req = Request::builder().method(method).uri(uri).header("content-type", "application/json");
    let req = req.body(body.map(|b| Body::from(b.to_string())).unwrap_or_else(Body::empty)).unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, serde_json::from_slice(&bytes).unwrap())
}

#[tokio::main]
async fn main() {
    let app = router(AppState::new(ServiceConfig::default()));

    let (_, health) = call(&app, "GET", "/api/health", None).await;
    println!("health: {health}");

    let scene = serde_json::to_value(SceneDocument::three_targets()).unwrap();
    let (status, created) = call(&app, "POST", "/api/scenes", Some(scene)).await;
    let scene_id = created["scene_id"].as_str().unwrap().to_string();
    println!("POST /api/scenes -> {status} {scene_id}");

    let (status, sim) =
        call(&app, "POST", &format!("/api/scenes/{scene_id}/simulate"), Some(json!({"snr_db": 15.3989, "seed": 1}))).await;
    let data_id = sim["data_id"].as_str().unwrap().to_string();
    println!("simulate -> {status} {data_id}, achieved {} dB", sim["achieved_snr_db"]);

    let request = json!({
        "data_id": data_id, "method": "km-eps", "eps": 1e-4,
        "region": {"center": [1.2, 1.1, 0.0], "half_widths": [0.078125, 0.078125]},
        "nx": 101, "ny": 101
    });
    let (status, image) = call(&app, "POST", "/api/images", Some(request)).await;
    let image_id = image["image_id"].as_str().unwrap().to_string();
    println!("close-up image -> {status}, peak {}", image["peak"]);

    let (status, fwhm) = call(&app, "GET", &format!("/api/images/{image_id}/fwhm"), None).await;
    println!("fwhm -> {status} in λ0 {}", fwhm["in_lambda0"]);

    let (status, err) = call(
        &app,
        "POST",
        "/api/images",
        Some(json!({"data_id": data_id, "method": "km", "region": {"center": [0, 0, 0], "half_widths": [2, 2]}, "nx": 10000, "ny": 10000})),
    )
    .await;
    println!("oversized request -> {status}: {}", err["error"]);
}
