//! Local JSON API for the design UI.

use crate::{assembly, curves, sequence, CliError};
use axum::extract::Query;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use metaori::config::{from_value, preset, schema, PRESETS};
use metaori::mechanics::Branch;
use metaori::mesh::validate_mesh;
use serde::Deserialize;
use serde_json::{json, Value};

const DEFAULT_STEPS: usize = 200;
const MAX_STEPS: usize = 5000;

pub fn router() -> Router {
    Router::new()
        .route("/api/mesh", post(mesh))
        .route("/api/curves", post(curves_handler))
        .route("/api/sequence", post(sequence_handler))
        .route("/api/presets", get(presets))
        .route("/api/schema", get(schema_handler))
}

struct ApiError(CliError);

impl From<CliError> for ApiError {
    fn from(e: CliError) -> Self {
        ApiError(e)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, kind) = match self.0 {
            CliError::Validation(_) => (StatusCode::BAD_REQUEST, "validation"),
            CliError::Solver(_) => (StatusCode::UNPROCESSABLE_ENTITY, "solver"),
            CliError::Io(_) => (StatusCode::INTERNAL_SERVER_ERROR, "io"),
        };
        (status, Json(json!({"kind": kind, "error": self.0.to_string()}))).into_response()
    }
}

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> Result<T, CliError> + Send + 'static) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f).await.map_err(|e| ApiError(CliError::Solver(e.to_string())))?.map_err(ApiError)
}

async fn mesh(Json(doc): Json<Value>) -> Result<Json<Value>, ApiError> {
    blocking(move || {
        let cfg = from_value(doc)?;
        let a = assembly(&cfg)?;
        let report = validate_mesh(&a.mesh);
        Ok(Json(json!({
            "vertices": a.mesh.vertices,
            "triangles": a.mesh.triangles,
            "report": report,
            "valid": report.is_valid(),
            "open_height": a.shell.open_height,
            "closed_height": a.shell.closed_height,
            "cavity_volume": a.cavity_volume() / 1000.0,
            "inflatable": a.inflatable,
        })))
    })
    .await
}

async fn curves_handler(Json(doc): Json<Value>) -> Result<Json<Value>, ApiError> {
    blocking(move || {
        let cfg = from_value(doc)?;
        let a = curves(&cfg)?;
        Ok(Json(json!({
            "fd_meta": a.fd_meta.samples,
            "fd_ori": a.fd_ori.samples,
            "fd_combined": a.fd_combined.samples,
            "pv": a.pv.samples,
            "events": a.pv.events,
            "fd_events": a.fd_events.extrema,
            "bistable": a.pv.bistable,
            "stable_zeros": a.stable_zeros,
            "elongation": a.elongation,
        })))
    })
    .await
}

#[derive(Deserialize)]
struct SequenceQuery {
    steps: Option<usize>,
}

async fn sequence_handler(Query(q): Query<SequenceQuery>, Json(doc): Json<Value>) -> Result<Json<Value>, ApiError> {
    let steps = q.steps.unwrap_or(DEFAULT_STEPS);
    if steps == 0 || steps > MAX_STEPS {
        return Err(ApiError(CliError::Validation(format!("steps must lie in 1..={MAX_STEPS}"))));
    }
    blocking(move || {
        let cfg = from_value(doc)?;
        let (segs, r) = sequence(&cfg, steps)?;
        let segments: Vec<Value> = segs
            .iter()
            .enumerate()
            .map(|(i, s)| {
                json!({
                    "infill": s.spec.infill,
                    "strokes": r.strokes.iter().map(|d| d[i]).collect::<Vec<_>>(),
                    "heights": r.heights.iter().map(|h| h[i]).collect::<Vec<_>>(),
                    "inflation_events": r.events.iter().filter(|e| e.segment == i && e.branch == Branch::Inflation).collect::<Vec<_>>(),
                    "deflation_events": r.events.iter().filter(|e| e.segment == i && e.branch == Branch::Deflation).collect::<Vec<_>>(),
                })
            })
            .collect();
        Ok(Json(json!({
            "volumes": r.volumes,
            "pressures": r.pressures,
            "segments": segments,
            "events": r.events,
        })))
    })
    .await
}

async fn presets() -> Json<Value> {
    let map: serde_json::Map<String, Value> = PRESETS
        .iter()
        .map(|&n| (n.to_string(), serde_json::to_value(preset(n).expect("listed preset")).expect("serializes")))
        .collect();
    Json(Value::Object(map))
}

async fn schema_handler() -> Json<Value> {
    Json(schema())
}
