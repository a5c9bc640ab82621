use axum::body::Body;
use axum::http::{Request, StatusCode};
use http_body_util::BodyExt;
use metaori_cli::service::router;
use serde_json::{json, Value};
use tower::ServiceExt;

async fn call(method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let req = Request::builder().method(method).uri(uri).header("content-type", "application/json");
    let req = req.body(body.map_or(Body::empty(), |b| Body::from(b.to_string()))).unwrap();
    let resp = router().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, serde_json::from_slice(&bytes).unwrap())
}

#[tokio::test]
async fn presets_carry_reference_dimensions() {
    let (s, v) = call("GET", "/api/presets", None).await;
    assert_eq!(s, StatusCode::OK);
    let shell = &v["paper"]["metashell"];
    assert_eq!(shell["c"], json!(12.5));
    assert_eq!(shell["l"], json!(22.5));
    assert_eq!(shell["t"], json!(1.25));
    assert_eq!(shell["h"], json!(9.4));
    assert_eq!(v["paper-bisegment"]["metashell"]["infill_per_row"], json!([0.99, 0.6]));
}

#[tokio::test]
async fn schema_lists_groups() {
    let (s, v) = call("GET", "/api/schema", None).await;
    assert_eq!(s, StatusCode::OK);
    for k in ["kresling", "metashell", "material", "integration", "segments"] {
        assert!(v["properties"][k].is_object(), "{k}");
    }
    assert_eq!(v["properties"]["kresling"]["properties"]["theta_deg"]["unit"], json!("deg"));
}

#[tokio::test]
async fn mesh_of_paper_preset_is_valid() {
    let (s, v) = call("POST", "/api/mesh", Some(json!({"preset": "paper"}))).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["valid"], json!(true));
    assert!(v["triangles"].as_array().unwrap().len() > 1000);
    assert!(v["cavity_volume"].as_f64().unwrap() > 0.0);
    assert_eq!(v["report"]["closed_manifold"], json!(true));
}

#[tokio::test]
async fn curves_are_stateless() {
    let body = json!({"preset": "paper"});
    let (s1, a) = call("POST", "/api/curves", Some(body.clone())).await;
    let (s2, b) = call("POST", "/api/curves", Some(body)).await;
    assert_eq!((s1, s2), (StatusCode::OK, StatusCode::OK));
    assert_eq!(a, b);
    assert_eq!(a["bistable"], json!(true));
    for k in ["fd_meta", "fd_ori", "fd_combined", "pv", "events"] {
        assert!(a[k].is_array(), "{k}");
    }
}

#[tokio::test]
async fn sequence_orders_segments() {
    let (s, v) = call("POST", "/api/sequence?steps=100", Some(json!({"preset": "paper-bisegment"}))).await;
    assert_eq!(s, StatusCode::OK);
    let segs = v["segments"].as_array().unwrap();
    assert_eq!(segs.len(), 2);
    let first = |i: usize| segs[i]["inflation_events"][0]["step"].as_u64().unwrap();
    assert!(first(1) < first(0));
    assert_eq!(v["volumes"].as_array().unwrap().len(), 201);
}

#[tokio::test]
async fn invalid_documents_are_rejected() {
    let (s, v) = call("POST", "/api/curves", Some(json!({"preset": "paper", "colour": 1}))).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert_eq!(v["kind"], json!("validation"));
    assert!(v["error"].as_str().unwrap().contains("/colour"));
    let (s, _) = call("POST", "/api/sequence?steps=0", Some(json!({"preset": "paper"}))).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
}
