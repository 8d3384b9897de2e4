//! HTTP JSON API over the imaging core.
//!
//! | Method | Path | Body | Reply |
//! |---|---|---|---|
//! | `POST` | `/api/scenes` | scene document | `201 {scene_id}` |
//! | `POST` | `/api/scenes/{id}/simulate` | `{snr_db \| noiseless, seed}` | `201 {data_id, achieved_snr_db}` |
//! | `POST` | `/api/images` | `{data_id, method, eps?, rank?, region {center, half_widths}, nx, ny}` | `201 {image_id, raster, peak, pixel_pitch, ...}` |
//! | `GET` | `/api/images/{id}/fwhm` | | `{range_fwhm_m, crossrange_fwhm_m, in_lambda0, ...}` |
//! | `GET` | `/api/health` | | `{status, name, version}` |
//!
//! Ids are content hashes of what they name, so repeating a request returns
//! the same id and a byte-identical body.

use std::collections::{HashMap, VecDeque};
use std::net::SocketAddr;
use std::sync::{Arc, Mutex};
use std::time::{SystemTime, UNIX_EPOCH};

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::error::Error;
use crate::forward::{add_noise, simulate_data, Acquisition, DataMatrix};
use crate::geometry::{ImagingGrid, Vec3};
use crate::imaging::{form_image, ImagingParams};
use crate::io::{write_data_matrix, SceneDocument};
use crate::raster::{ImageRaster, Method};
use crate::resolution::fwhm_1d;

/// Limits applied to every request.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ServiceConfig {
    /// Largest accepted `nx * ny`.
    pub pixel_budget: usize,
    /// Largest accepted region half width, meters.
    pub max_half_width_m: f64,
    /// Entries kept per kind (scenes, data, images) before the oldest is evicted.
    pub capacity: usize,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self { pixel_budget: 256 * 256, max_half_width_m: 500.0, capacity: 64 }
    }
}

#[derive(Debug)]
struct Entry<T> {
    value: Arc<T>,
    created_unix_ms: u128,
}

/// One bounded, insertion-ordered table.
#[derive(Debug)]
struct Table<T> {
    entries: HashMap<String, Entry<T>>,
    order: VecDeque<String>,
    capacity: usize,
}

impl<T> Table<T> {
    fn new(capacity: usize) -> Self {
        Self { entries: HashMap::new(), order: VecDeque::new(), capacity: capacity.max(1) }
    }

    fn insert(&mut self, id: String, value: T) -> Arc<T> {
        if let Some(e) = self.entries.get(&id) {
            return e.value.clone();
        }
        while self.order.len() >= self.capacity {
            if let Some(old) = self.order.pop_front() {
                self.entries.remove(&old);
            }
        }
        let created_unix_ms = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis()).unwrap_or(0);
        let value = Arc::new(value);
        self.entries.insert(id.clone(), Entry { value: value.clone(), created_unix_ms });
        self.order.push_back(id);
        value
    }

    fn get(&self, id: &str) -> Option<Arc<T>> {
        self.entries.get(id).map(|e| e.value.clone())
    }
}

/// A stored raster with the wavelength needed to express widths in λ0.
#[derive(Debug)]
pub struct StoredImage {
    pub raster: ImageRaster,
    pub lambda0: f64,
}

#[derive(Debug)]
struct Tables {
    scenes: Table<SceneDocument>,
    data: Table<DataMatrix>,
    images: Table<StoredImage>,
}

/// Scenes, data matrices and rasters keyed by content-hash ids.
///
/// Each kind holds at most `capacity` entries; inserting beyond that evicts
/// the oldest. All access goes through one mutex.
#[derive(Debug)]
pub struct SessionStore {
    inner: Mutex<Tables>,
}

impl SessionStore {
    pub fn new(capacity: usize) -> Self {
        Self {
            inner: Mutex::new(Tables {
                scenes: Table::new(capacity),
                data: Table::new(capacity),
                images: Table::new(capacity),
            }),
        }
    }

    fn lock(&self) -> std::sync::MutexGuard<'_, Tables> {
        self.inner.lock().unwrap_or_else(|p| p.into_inner())
    }

    pub fn insert_scene(&self, id: String, scene: SceneDocument) -> Arc<SceneDocument> {
        self.lock().scenes.insert(id, scene)
    }

    pub fn scene(&self, id: &str) -> Option<Arc<SceneDocument>> {
        self.lock().scenes.get(id)
    }

    pub fn insert_data(&self, id: String, data: DataMatrix) -> Arc<DataMatrix> {
        self.lock().data.insert(id, data)
    }

    pub fn data(&self, id: &str) -> Option<Arc<DataMatrix>> {
        self.lock().data.get(id)
    }

    pub fn insert_image(&self, id: String, image: StoredImage) -> Arc<StoredImage> {
        self.lock().images.insert(id, image)
    }

    pub fn image(&self, id: &str) -> Option<Arc<StoredImage>> {
        self.lock().images.get(id)
    }

    /// Creation time of a stored scene, data matrix or image.
    pub fn created_unix_ms(&self, id: &str) -> Option<u128> {
        let t = self.lock();
        t.scenes
            .entries
            .get(id)
            .map(|e| e.created_unix_ms)
            .or_else(|| t.data.entries.get(id).map(|e| e.created_unix_ms))
            .or_else(|| t.images.entries.get(id).map(|e| e.created_unix_ms))
    }

    /// Number of stored (scenes, data matrices, images).
    pub fn counts(&self) -> (usize, usize, usize) {
        let t = self.lock();
        (t.scenes.entries.len(), t.data.entries.len(), t.images.entries.len())
    }
}

#[derive(Debug, Clone)]
pub struct AppState {
    pub store: Arc<SessionStore>,
    pub config: ServiceConfig,
}

impl AppState {
    pub fn new(config: ServiceConfig) -> Self {
        Self { store: Arc::new(SessionStore::new(config.capacity)), config }
    }
}

fn content_id(prefix: &str, bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    format!("{prefix}-{}", hex::encode(&digest[..12]))
}

#[derive(Debug, Clone, Serialize)]
pub struct FieldError {
    pub field: String,
    pub message: String,
}

/// Error reply: status plus `{"error": ..., "fields": [...]}` body.
#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub message: String,
    pub fields: Vec<FieldError>,
    pub extra: Option<serde_json::Value>,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        Self { status, message: message.into(), fields: Vec::new(), extra: None }
    }

    fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, message)
    }

    fn not_found(kind: &str, id: &str) -> Self {
        Self::new(StatusCode::NOT_FOUND, format!("unknown {kind} id '{id}'"))
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Degenerate(_) => StatusCode::UNPROCESSABLE_ENTITY,
            Error::Bracket(_) => StatusCode::CONFLICT,
            Error::Io(_) => StatusCode::INTERNAL_SERVER_ERROR,
            _ => StatusCode::BAD_REQUEST,
        };
        Self::new(status, e.to_string())
    }
}

impl From<JsonRejection> for ApiError {
    fn from(r: JsonRejection) -> Self {
        let mut e = Self::bad_request("request body is not valid JSON for this endpoint");
        e.fields.push(FieldError { field: "body".into(), message: r.body_text() });
        e
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let mut body = json!({ "error": self.message, "fields": self.fields });
        if let (Some(extra), Some(obj)) = (self.extra, body.as_object_mut()) {
            if let Some(map) = extra.as_object() {
                obj.extend(map.clone());
            }
        }
        (self.status, Json(body)).into_response()
    }
}

type ApiResult<T> = std::result::Result<T, ApiError>;

/// Field-by-field validation of a scene document.
pub fn scene_field_errors(doc: &SceneDocument) -> Vec<FieldError> {
    let mut out = Vec::new();
    let mut push = |field: String, r: crate::Result<()>| {
        if let Err(e) = r {
            out.push(FieldError { field, message: e.to_string() });
        }
    };
    push("system.radar".into(), doc.system.radar.validate());
    push("system".into(), doc.system.flight_path().map(|_| ()));
    for (k, t) in doc.targets.iter().enumerate() {
        push(format!("targets[{k}]"), crate::geometry::Scene::new(vec![*t]).validate());
    }
    push("region".into(), doc.region.validate());
    out
}

async fn health() -> Json<serde_json::Value> {
    Json(json!({ "status": "ok", "name": env!("CARGO_PKG_NAME"), "version": env!("CARGO_PKG_VERSION") }))
}

async fn create_scene(
    State(state): State<AppState>,
    body: std::result::Result<Json<SceneDocument>, JsonRejection>,
) -> ApiResult<(StatusCode, Json<serde_json::Value>)> {
    let Json(doc) = body?;
    let fields = scene_field_errors(&doc);
    if !fields.is_empty() {
        let mut e = ApiError::bad_request("scene failed validation");
        e.fields = fields;
        return Err(e);
    }
    let id = content_id("scene", serde_json::to_string(&doc).map_err(Error::from)?.as_bytes());
    state.store.insert_scene(id.clone(), doc);
    Ok((StatusCode::CREATED, Json(json!({ "scene_id": id }))))
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateRequest {
    #[serde(default)]
    pub snr_db: Option<f64>,
    #[serde(default)]
    pub noiseless: bool,
    #[serde(default)]
    pub seed: u64,
}

async fn simulate(
    State(state): State<AppState>,
    Path(scene_id): Path<String>,
    body: std::result::Result<Json<SimulateRequest>, JsonRejection>,
) -> ApiResult<(StatusCode, Json<serde_json::Value>)> {
    let Json(req) = body?;
    let scene = state.store.scene(&scene_id).ok_or_else(|| ApiError::not_found("scene", &scene_id))?;
    let snr = match (req.snr_db, req.noiseless) {
        (Some(_), true) => return Err(ApiError::bad_request("give either snr_db or noiseless=true, not both")),
        (None, false) => return Err(ApiError::bad_request("give snr_db or noiseless=true")),
        (Some(s), false) if !s.is_finite() => return Err(ApiError::bad_request("snr_db must be finite")),
        (s, _) => s,
    };
    let data = tokio::task::spawn_blocking(move || -> crate::Result<DataMatrix> {
        let acq = Acquisition::from_system(&scene.system)?;
        let clean = simulate_data(&scene.scene(), &acq)?;
        match snr {
            Some(s) => add_noise(&clean, s, req.seed),
            None => Ok(clean),
        }
    })
    .await
    .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))??;
    let achieved = data.noise.map(|n| n.snr_db_achieved);
    let id = content_id("data", write_data_matrix(&data).as_bytes());
    state.store.insert_data(id.clone(), data);
    Ok((StatusCode::CREATED, Json(json!({ "data_id": id, "achieved_snr_db": achieved }))))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub center: [f64; 3],
    pub half_widths: [f64; 2],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImageRequest {
    pub data_id: String,
    pub method: Method,
    #[serde(default)]
    pub eps: Option<f64>,
    #[serde(default)]
    pub rank: Option<usize>,
    pub region: Region,
    pub nx: usize,
    pub ny: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PeakReply {
    pub ix: usize,
    pub iy: usize,
    pub x: f64,
    pub y: f64,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ImageReply {
    pub image_id: String,
    pub method: Method,
    pub eps: Option<f64>,
    pub region: Region,
    pub nx: usize,
    pub ny: usize,
    /// Row-major (`iy * nx + ix`), `x` cross-range, `y` range.
    pub raster: Vec<f64>,
    pub peak: Option<PeakReply>,
    pub pixel_pitch: [f64; 2],
    pub lambda0_m: f64,
}

async fn create_image(
    State(state): State<AppState>,
    body: std::result::Result<Json<ImageRequest>, JsonRejection>,
) -> ApiResult<(StatusCode, Json<ImageReply>)> {
    let Json(req) = body?;
    let pixels = req.nx.saturating_mul(req.ny);
    if pixels > state.config.pixel_budget {
        let mut e = ApiError::new(
            StatusCode::PAYLOAD_TOO_LARGE,
            format!("{}x{} = {pixels} pixels exceeds the budget of {}", req.nx, req.ny, state.config.pixel_budget),
        );
        e.extra = Some(json!({ "pixel_budget": state.config.pixel_budget }));
        return Err(e);
    }
    let [hx, hy] = req.region.half_widths;
    if hx > state.config.max_half_width_m || hy > state.config.max_half_width_m {
        let mut e = ApiError::bad_request("region exceeds the maximum extent");
        e.fields.push(FieldError {
            field: "region.half_widths".into(),
            message: format!("each half width must be <= {} m", state.config.max_half_width_m),
        });
        return Err(e);
    }
    let params = ImagingParams::new(req.method, req.eps, req.rank)?;
    let [cx, cy, cz] = req.region.center;
    let grid = ImagingGrid::new(Vec3::new(cx, cy, cz), hx, hy, req.nx, req.ny)?;
    let data = state.store.data(&req.data_id).ok_or_else(|| ApiError::not_found("data", &req.data_id))?;
    let lambda0 = data.acquisition.lambda0();
    let raster = tokio::task::spawn_blocking(move || form_image(&data, &grid, &params))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))??;
    let id = content_id("image", serde_json::to_string(&req).map_err(Error::from)?.as_bytes());
    let reply = ImageReply {
        image_id: id.clone(),
        method: raster.method,
        eps: raster.eps,
        region: req.region,
        nx: grid.nx,
        ny: grid.ny,
        peak: raster.peak.map(|p| PeakReply { ix: p.ix, iy: p.iy, x: p.position.x, y: p.position.y, value: p.value }),
        pixel_pitch: [grid.pitch_x(), grid.pitch_y()],
        lambda0_m: lambda0,
        raster: raster.values.clone(),
    };
    state.store.insert_image(id, StoredImage { raster, lambda0 });
    Ok((StatusCode::CREATED, Json(reply)))
}

/// Widths through the peak, each axis reported independently.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FwhmReply {
    pub range_fwhm_m: Option<f64>,
    pub crossrange_fwhm_m: Option<f64>,
    pub in_lambda0: AxisPair,
    /// Half-maximum bracket failure per axis, when one occurred.
    pub bracket_failure: AxisFlags,
    pub peak: PeakReply,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AxisPair {
    pub range: Option<f64>,
    pub crossrange: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AxisFlags {
    pub range: Option<String>,
    pub crossrange: Option<String>,
}

pub fn fwhm_reply(image: &StoredImage) -> ApiResult<FwhmReply> {
    let r = &image.raster;
    let g = &r.grid;
    let p = r.peak.ok_or_else(|| ApiError::new(StatusCode::CONFLICT, "raster has no peak (all zero)"))?;
    if p.ix == 0 || p.iy == 0 || p.ix == g.nx - 1 || p.iy == g.ny - 1 {
        return Err(ApiError::new(
            StatusCode::CONFLICT,
            format!("peak pixel ({}, {}) lies on the region boundary", p.ix, p.iy),
        ));
    }
    let ys: Vec<f64> = (0..g.ny).map(|i| g.y(i)).collect();
    let xs: Vec<f64> = (0..g.nx).map(|i| g.x(i)).collect();
    let range = fwhm_1d(&ys, &r.column(p.ix));
    let cross = fwhm_1d(&xs, r.row(p.iy));
    let l0 = image.lambda0;
    Ok(FwhmReply {
        range_fwhm_m: range.as_ref().ok().copied(),
        crossrange_fwhm_m: cross.as_ref().ok().copied(),
        in_lambda0: AxisPair {
            range: range.as_ref().ok().map(|w| w / l0),
            crossrange: cross.as_ref().ok().map(|w| w / l0),
        },
        bracket_failure: AxisFlags {
            range: range.as_ref().err().map(|e| e.to_string()),
            crossrange: cross.as_ref().err().map(|e| e.to_string()),
        },
        peak: PeakReply { ix: p.ix, iy: p.iy, x: p.position.x, y: p.position.y, value: p.value },
    })
}

async fn image_fwhm(State(state): State<AppState>, Path(image_id): Path<String>) -> ApiResult<Json<FwhmReply>> {
    let image = state.store.image(&image_id).ok_or_else(|| ApiError::not_found("image", &image_id))?;
    fwhm_reply(&image).map(Json)
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/api/health", get(health))
        .route("/api/scenes", post(create_scene))
        .route("/api/scenes/{id}/simulate", post(simulate))
        .route("/api/images", post(create_image))
        .route("/api/images/{id}/fwhm", get(image_fwhm))
        .with_state(state)
}

/// Binds `addr` and serves until the process is stopped.
pub async fn serve(addr: SocketAddr, config: ServiceConfig) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(AppState::new(config))).await
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_evicts_oldest() {
        let mut t = Table::new(2);
        t.insert("a".into(), 1);
        t.insert("b".into(), 2);
        t.insert("a".into(), 9);
        assert_eq!(*t.get("a").unwrap(), 1);
        t.insert("c".into(), 3);
        assert!(t.get("a").is_none());
        assert_eq!(*t.get("b").unwrap(), 2);
        assert_eq!(*t.get("c").unwrap(), 3);
    }

    #[test]
    fn content_ids_are_stable() {
        assert_eq!(content_id("x", b"abc"), content_id("x", b"abc"));
        assert_ne!(content_id("x", b"abc"), content_id("x", b"abd"));
        assert_eq!(content_id("x", b"").len(), 2 + 24);
    }

    #[test]
    fn scene_errors_name_fields() {
        let mut doc = SceneDocument::three_targets();
        doc.system.radar.bandwidth = -1.0;
        doc.targets[1].reflectivity = f64::NAN;
        let fields: Vec<String> = scene_field_errors(&doc).into_iter().map(|f| f.field).collect();
        assert!(fields.contains(&"system.radar".to_string()));
        assert!(fields.contains(&"targets[1]".to_string()));
    }
}
