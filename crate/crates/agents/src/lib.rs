//! Planning agents. Every backend turns a prompt into raw plan text; the
//! caller parses and checks it.
//!
//! The scripted mock plans with the solver and then breaks the plan on
//! purpose, according to a seeded fault profile. The HTTP backend posts
//! the prompt to a chat-completion endpoint and returns the reply verbatim.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;
use tripwise_core::{ReferenceBundle, TravelQuery};

pub mod http;
pub mod mock;

pub use mock::SUPPORTED_FAULTS;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BackendConfig {
    ScriptedMock(MockConfig),
    HttpLlm(HttpConfig),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MockConfig {
    /// Constraint id to injection probability.
    pub fault_profile: BTreeMap<String, f64>,
    pub seed: u64,
    /// Skip faults whose constraint id appears in the prompt's examples.
    pub prompt_sensitive: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HttpConfig {
    pub endpoint: String,
    pub model: String,
    #[serde(default = "default_timeout")]
    pub timeout_secs: u64,
    #[serde(default = "default_retries")]
    pub max_retries: u32,
    /// Name of the environment variable holding the bearer token.
    pub credential_env: String,
    #[serde(default = "default_backoff")]
    pub initial_backoff_ms: u64,
    /// Extra request fields (temperature, max_tokens, ...), passed through.
    #[serde(default)]
    pub params: serde_json::Map<String, serde_json::Value>,
}

fn default_timeout() -> u64 {
    120
}

fn default_retries() -> u32 {
    3
}

fn default_backoff() -> u64 {
    1000
}

impl HttpConfig {
    pub fn new(endpoint: &str, model: &str, credential_env: &str) -> Self {
        HttpConfig {
            endpoint: endpoint.into(),
            model: model.into(),
            timeout_secs: default_timeout(),
            max_retries: default_retries(),
            credential_env: credential_env.into(),
            initial_backoff_ms: default_backoff(),
            params: Default::default(),
        }
    }
}

#[derive(Debug, Error)]
pub enum AgentError {
    #[error("invalid backend config: {0}")]
    InvalidConfig(String),
    #[error("credential variable {0} is not set")]
    CredentialMissing(String),
    #[error("transport failure after {attempts} attempt(s): {reason}")]
    TransportFailure { attempts: u32, reason: String },
    #[error("mock could not produce a base plan: {0}")]
    MockInfeasible(String),
}

impl BackendConfig {
    pub fn mock() -> Self {
        BackendConfig::ScriptedMock(MockConfig::default())
    }

    pub fn mock_with_fault(constraint_id: &str, probability: f64, prompt_sensitive: bool) -> Self {
        BackendConfig::ScriptedMock(MockConfig {
            fault_profile: BTreeMap::from([(constraint_id.to_string(), probability)]),
            seed: 0,
            prompt_sensitive,
        })
    }

    pub fn validate(&self) -> Result<(), AgentError> {
        match self {
            BackendConfig::ScriptedMock(m) => {
                for (id, p) in &m.fault_profile {
                    if !SUPPORTED_FAULTS.contains(&id.as_str()) {
                        return Err(AgentError::InvalidConfig(format!(
                            "no fault injector for {id}; supported: {}",
                            SUPPORTED_FAULTS.join(", ")
                        )));
                    }
                    if !(0.0..=1.0).contains(p) {
                        return Err(AgentError::InvalidConfig(format!("probability {p} for {id} is outside [0, 1]")));
                    }
                }
                Ok(())
            }
            BackendConfig::HttpLlm(h) => {
                if h.timeout_secs == 0 {
                    return Err(AgentError::InvalidConfig("timeout must be positive".into()));
                }
                if h.endpoint.trim().is_empty() || h.model.trim().is_empty() || h.credential_env.trim().is_empty() {
                    return Err(AgentError::InvalidConfig("endpoint, model and credential_env are required".into()));
                }
                reqwest::Url::parse(&h.endpoint)
                    .map_err(|e| AgentError::InvalidConfig(format!("endpoint {:?}: {e}", h.endpoint)))?;
                Ok(())
            }
        }
    }

    /// Validation plus the environment checks a run needs before it
    /// starts: an http backend must find its credential.
    pub fn preflight(&self) -> Result<(), AgentError> {
        self.validate()?;
        if let BackendConfig::HttpLlm(h) = self {
            if std::env::var(&h.credential_env).map_or(true, |v| v.is_empty()) {
                return Err(AgentError::CredentialMissing(h.credential_env.clone()));
            }
        }
        Ok(())
    }

    /// Short stable digest of the configuration, recorded with each run.
    pub fn fingerprint(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        hex::encode(&Sha256::digest(&json)[..8])
    }
}

/// Produces raw plan text for one query.
pub fn plan_with_backend(
    prompt: &str,
    q: &TravelQuery,
    b: &ReferenceBundle,
    cfg: &BackendConfig,
) -> Result<String, AgentError> {
    cfg.validate()?;
    match cfg {
        BackendConfig::ScriptedMock(m) => mock::plan(prompt, q, b, m),
        BackendConfig::HttpLlm(h) => http::complete(prompt, h),
    }
}

/// One batch item's result. A failed item has empty `text` and the reason.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatchOutput {
    pub query_id: String,
    pub text: String,
    pub failure: Option<String>,
}

/// Runs every `(prompt, query)` pair with at most `parallelism` in flight.
/// Outputs follow input order; failures are recorded per item.
pub fn run_batch(
    items: &[(String, TravelQuery)],
    b: &ReferenceBundle,
    cfg: &BackendConfig,
    parallelism: usize,
) -> Vec<BatchOutput> {
    let slots: Vec<Mutex<Option<BatchOutput>>> = items.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let workers = parallelism.clamp(1, items.len().max(1));
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some((prompt, q)) = items.get(i) else {
                    break;
                };
                let out = match plan_with_backend(prompt, q, b, cfg) {
                    Ok(text) => BatchOutput {
                        query_id: q.id.clone(),
                        text,
                        failure: None,
                    },
                    Err(e) => {
                        log::warn!("query {}: {e}", q.id);
                        BatchOutput {
                            query_id: q.id.clone(),
                            text: String::new(),
                            failure: Some(e.to_string()),
                        }
                    }
                };
                *slots[i].lock().expect("slot lock") = Some(out);
            });
        }
    });
    slots
        .into_iter()
        .map(|m| m.into_inner().expect("slot lock").expect("every slot filled"))
        .collect()
}
