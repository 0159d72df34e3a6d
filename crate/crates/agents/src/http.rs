//! Chat-completion client. Transport only: the reply text is returned as is.

use std::thread::sleep;
use std::time::Duration;

use reqwest::blocking::Client;
use reqwest::StatusCode;
use serde_json::{json, Value};

use crate::{AgentError, HttpConfig};

/// Replaces every occurrence of `secret` in `text`.
pub fn redact(text: &str, secret: &str) -> String {
    if secret.is_empty() {
        text.to_string()
    } else {
        text.replace(secret, "[REDACTED]")
    }
}

pub fn request_body(prompt: &str, cfg: &HttpConfig) -> Value {
    let mut body = serde_json::Map::new();
    for (k, v) in &cfg.params {
        body.insert(k.clone(), v.clone());
    }
    body.insert("model".into(), json!(cfg.model));
    body.insert("messages".into(), json!([{ "role": "user", "content": prompt }]));
    Value::Object(body)
}

enum Attempt {
    Done(String),
    Retry(String),
    Fatal(String),
}

fn reply_text(body: &str) -> Result<String, String> {
    let v: Value = serde_json::from_str(body).map_err(|e| format!("response is not JSON: {e}"))?;
    v.pointer("/choices/0/message/content")
        .and_then(Value::as_str)
        .map(str::to_string)
        .ok_or_else(|| "response has no choices[0].message.content".to_string())
}

fn attempt(client: &Client, cfg: &HttpConfig, token: &str, body: &Value) -> Attempt {
    let resp = match client.post(&cfg.endpoint).bearer_auth(token).json(body).send() {
        Ok(r) => r,
        Err(e) => return Attempt::Retry(redact(&e.to_string(), token)),
    };
    let status = resp.status();
    let text = match resp.text() {
        Ok(t) => t,
        Err(e) => return Attempt::Retry(redact(&e.to_string(), token)),
    };
    log::debug!("response {status}: {}", redact(&text, token));
    if status.is_success() {
        return match reply_text(&text) {
            Ok(t) => Attempt::Done(t),
            Err(e) => Attempt::Fatal(e),
        };
    }
    let reason = format!("HTTP {status}");
    if status.is_server_error() || status == StatusCode::TOO_MANY_REQUESTS || status == StatusCode::REQUEST_TIMEOUT {
        Attempt::Retry(reason)
    } else {
        Attempt::Fatal(reason)
    }
}

/// Sends `prompt` as a single user message, retrying transient failures
/// with exponential backoff.
pub fn complete(prompt: &str, cfg: &HttpConfig) -> Result<String, AgentError> {
    let token = std::env::var(&cfg.credential_env)
        .ok()
        .filter(|t| !t.is_empty())
        .ok_or_else(|| AgentError::CredentialMissing(cfg.credential_env.clone()))?;
    let client = Client::builder()
        .timeout(Duration::from_secs(cfg.timeout_secs))
        .build()
        .map_err(|e| AgentError::TransportFailure {
            attempts: 0,
            reason: e.to_string(),
        })?;
    let body = request_body(prompt, cfg);
    log::debug!("POST {} {}", cfg.endpoint, redact(&body.to_string(), &token));
    let mut backoff = Duration::from_millis(cfg.initial_backoff_ms);
    let mut attempts = 0;
    loop {
        attempts += 1;
        match attempt(&client, cfg, &token, &body) {
            Attempt::Done(text) => return Ok(text),
            Attempt::Fatal(reason) => return Err(AgentError::TransportFailure { attempts, reason }),
            Attempt::Retry(reason) if attempts > cfg.max_retries => {
                return Err(AgentError::TransportFailure { attempts, reason })
            }
            Attempt::Retry(reason) => {
                log::warn!("attempt {attempts} failed: {reason}; retrying in {backoff:?}");
                sleep(backoff);
                backoff *= 2;
            }
        }
    }
}
