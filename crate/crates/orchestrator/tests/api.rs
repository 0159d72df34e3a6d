mod common;

use std::sync::Arc;
use std::time::Duration;

use axum::body::{to_bytes, Body};
use axum::http::{Request, StatusCode};
use axum::Router;
use serde_json::{json, Value};
use tower::ServiceExt;
use tripwise_core::solver::{generate_plan, SearchConfig};
use tripwise_core::write_plan;
use tripwise_orchestrator::api::{router, AppState};

fn app(n_train: usize) -> (tempfile::TempDir, Arc<tripwise_orchestrator::Project>, Router) {
    let (d, p) = common::project(n_train, 2);
    let p = Arc::new(p);
    (d, p.clone(), router(AppState::new(p, 2)))
}

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Vec<u8>) {
    let req = Request::builder().method(method).uri(uri);
    let req = match body {
        Some(b) => req
            .header("content-type", "application/json")
            .body(Body::from(b.to_string()))
            .unwrap(),
        None => req.body(Body::empty()).unwrap(),
    };
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    (status, to_bytes(resp.into_body(), usize::MAX).await.unwrap().to_vec())
}

async fn json_call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let (s, b) = call(app, method, uri, body).await;
    (s, serde_json::from_slice(&b).unwrap_or(Value::Null))
}

async fn finish(app: &Router, run_id: &str) -> Value {
    for _ in 0..400 {
        let (s, v) = json_call(app, "GET", &format!("/runs/{run_id}"), None).await;
        assert_eq!(s, StatusCode::OK);
        if v["status"] != "running" {
            return v;
        }
        tokio::time::sleep(Duration::from_millis(25)).await;
    }
    panic!("{run_id} never finished");
}

#[tokio::test(flavor = "multi_thread", worker_threads = 2)]
async fn triage_workflow() {
    let (_d, p, app) = app(4);
    let (s, v) = json_call(&app, "GET", "/runs", None).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v, json!([]));

    let start = json!({
        "split": "train",
        "backend": { "kind": "scripted-mock", "fault_profile": { "diverse-attractions": 1.0 }, "prompt_sensitive": true }
    });
    let (s, v) = json_call(&app, "POST", "/runs", Some(start.clone())).await;
    assert_eq!(s, StatusCode::ACCEPTED);
    assert_eq!(v["status"], "running");
    let run_id = v["run_id"].as_str().unwrap().to_string();
    let done = finish(&app, &run_id).await;
    assert_eq!(done["status"], "done");
    assert_eq!(done["record"]["report"]["final_pass_rate"], json!(0.0));

    let (s, v) = json_call(&app, "GET", "/runs", None).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v.as_array().unwrap().len(), 1);
    assert_eq!(v[0]["run_id"], json!(run_id));

    let (s, groups) = json_call(&app, "GET", &format!("/runs/{run_id}/failures"), None).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(groups[0]["constraint_id"], "diverse-attractions");
    assert_eq!(groups[0]["count"], 4);
    let expected = p.list_failures(&run_id).unwrap();
    assert_eq!(groups, serde_json::to_value(&expected).unwrap());

    let item = &groups[0]["items"][0];
    let qid = item["query"]["id"].as_str().unwrap().to_string();
    let bad = json!({ "run_id": run_id, "query_id": qid, "corrected_plan": item["raw_text"], "note": "" });
    let (s, v) = json_call(&app, "POST", "/exemplars", Some(bad)).await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(v["error"], "exemplar-invariant-violation");
    assert_eq!(v["failing"], json!(["diverse-attractions"]));

    let q = p.query(&qid).unwrap().clone();
    let fixed = write_plan(&generate_plan(&q, p.bundle(), &SearchConfig::default()).unwrap());
    let good = json!({ "run_id": run_id, "query_id": qid, "corrected_plan": fixed, "note": "each sight once" });
    let (s, v) = json_call(&app, "POST", "/exemplars", Some(good.clone())).await;
    assert_eq!(s, StatusCode::CREATED);
    let ex = v["exemplar_id"].as_str().unwrap().to_string();
    let (_, again) = json_call(&app, "POST", "/exemplars", Some(good)).await;
    assert_eq!(again["exemplar_id"], json!(ex));

    let (s, v) = json_call(&app, "POST", "/revisions", Some(json!({ "exemplar_ids": [] }))).await;
    assert_eq!(s, StatusCode::BAD_REQUEST, "{v}");
    let (s, v) = json_call(&app, "POST", "/revisions", Some(json!({ "exemplar_ids": [ex] }))).await;
    assert_eq!(s, StatusCode::CREATED);
    assert_eq!(v["id"], "R1");

    let (s, text) = call(&app, "GET", "/revisions/1/prompt", None).await;
    assert_eq!(s, StatusCode::OK);
    let text = String::from_utf8(text).unwrap();
    assert!(text.starts_with("# Prompt revision R1"));
    assert!(text.contains("Failed constraints: diverse-attractions"));

    let (s, v) = json_call(&app, "POST", "/runs", Some(start)).await;
    assert_eq!(s, StatusCode::ACCEPTED);
    let done = finish(&app, v["run_id"].as_str().unwrap()).await;
    assert_eq!(done["record"]["revision_id"], "R1");
    assert_eq!(done["record"]["report"]["final_pass_rate"], json!(100.0));
}

#[tokio::test(flavor = "multi_thread", worker_threads = 2)]
async fn errors_map_to_status_codes() {
    let (_d, _p, app) = app(2);
    let (s, v) = json_call(&app, "GET", "/runs/run-0042", None).await;
    assert_eq!(s, StatusCode::NOT_FOUND);
    assert_eq!(v["error"], "unknown-run");
    let (s, _) = json_call(&app, "GET", "/runs/run-0042/failures", None).await;
    assert_eq!(s, StatusCode::NOT_FOUND);
    let (s, _) = call(&app, "GET", "/revisions/5/prompt", None).await;
    assert_eq!(s, StatusCode::NOT_FOUND);
    let (s, _) = json_call(&app, "POST", "/runs", Some(json!({ "split": "test" }))).await;
    assert!(s.is_client_error());
    let (s, v) = json_call(&app, "POST", "/runs", Some(json!({ "split": "train", "revision": 9 }))).await;
    assert_eq!(s, StatusCode::NOT_FOUND, "{v}");
    let http = json!({
        "split": "train",
        "backend": { "kind": "http-llm", "endpoint": "http://127.0.0.1:9/v1", "model": "m", "credential_env": "TRIPWISE_API_TEST_UNSET" }
    });
    let (s, v) = json_call(&app, "POST", "/runs", Some(http)).await;
    assert_eq!(s, StatusCode::BAD_GATEWAY);
    assert!(v["message"].as_str().unwrap().contains("TRIPWISE_API_TEST_UNSET"));
    let bad_fault = json!({ "split": "train", "backend": { "kind": "scripted-mock", "fault_profile": { "budget": 2.0 } } });
    let (s, _) = json_call(&app, "POST", "/runs", Some(bad_fault)).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    let (s, v) = json_call(&app, "POST", "/exemplars", Some(json!({ "run_id": "run-0001", "query_id": "x", "corrected_plan": "" }))).await;
    assert_eq!(s, StatusCode::NOT_FOUND, "{v}");
}

#[tokio::test(flavor = "multi_thread", worker_threads = 2)]
async fn failed_jobs_report_failed() {
    let (d, _p, app) = app(2);
    let (s, v) = json_call(&app, "POST", "/runs", Some(json!({ "split": "train" }))).await;
    assert_eq!(s, StatusCode::ACCEPTED);
    let id = v["run_id"].as_str().unwrap().to_string();
    let done = finish(&app, &id).await;
    assert_eq!(done["status"], "done");
    std::fs::remove_dir_all(d.path().join("runs/objects")).unwrap();
    std::fs::write(d.path().join("runs/objects"), "not a directory").unwrap();
    let (_, v) = json_call(&app, "POST", "/runs", Some(json!({ "split": "train" }))).await;
    let done = finish(&app, v["run_id"].as_str().unwrap()).await;
    assert_eq!(done["status"], "failed");
    assert!(done["error"].as_str().unwrap().contains("storage"));
}
