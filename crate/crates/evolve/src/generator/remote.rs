//! Chat-completion backend over HTTPS, with bounded retries and an
//! append-only JSONL journal of every exchange.

use std::env;
use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::Path;
use std::thread;
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use reqwest::blocking::Client;
use reqwest::StatusCode;
use serde_json::{json, Value};

use super::prompt::{extract_reply, render_prompt};
use super::{Generator, GeneratorError, GeneratorRequest, Reply};

pub const ENV_BASE_URL: &str = "STOWAGE_LLM_BASE_URL";
pub const ENV_MODEL: &str = "STOWAGE_LLM_MODEL";
pub const ENV_API_KEY: &str = "STOWAGE_LLM_API_KEY";

#[derive(Debug, Clone, PartialEq)]
pub struct RemoteConfig {
    /// Endpoint root; `/chat/completions` is appended.
    pub base_url: String,
    pub model: String,
    pub api_key: Option<String>,
    pub temperature: f64,
    pub request_timeout: Duration,
    /// Retries after the first attempt.
    pub max_retries: u32,
    /// Delay before the first retry; doubles each time, capped at 30 s.
    pub backoff: Duration,
}

impl RemoteConfig {
    pub fn new(base_url: impl Into<String>, model: impl Into<String>) -> Self {
        Self {
            base_url: base_url.into(),
            model: model.into(),
            api_key: None,
            temperature: 1.0,
            request_timeout: Duration::from_secs(120),
            max_retries: 3,
            backoff: Duration::from_millis(500),
        }
    }

    /// Reads the endpoint, model and optional key from the environment.
    pub fn from_env() -> Result<Self, GeneratorError> {
        let var = |k: &str| env::var(k).ok().filter(|v| !v.trim().is_empty());
        let base = var(ENV_BASE_URL).ok_or_else(|| GeneratorError::Config(format!("{ENV_BASE_URL} is not set")))?;
        let model = var(ENV_MODEL).ok_or_else(|| GeneratorError::Config(format!("{ENV_MODEL} is not set")))?;
        Ok(Self { api_key: var(ENV_API_KEY), ..Self::new(base, model) })
    }

    fn endpoint(&self) -> String {
        format!("{}/chat/completions", self.base_url.trim_end_matches('/'))
    }

    fn delay(&self, retry: u32) -> Duration {
        self.backoff.saturating_mul(2u32.saturating_pow(retry)).min(Duration::from_secs(30))
    }
}

pub struct RemoteGenerator {
    cfg: RemoteConfig,
    client: Client,
    journal: Option<File>,
}

fn now_ms() -> u128 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis()).unwrap_or(0)
}

enum Attempt {
    Done(String),
    Retry(String),
    Fatal(GeneratorError),
}

impl RemoteGenerator {
    pub fn new(cfg: RemoteConfig) -> Result<Self, GeneratorError> {
        let client = Client::builder()
            .timeout(cfg.request_timeout)
            .build()
            .map_err(|e| GeneratorError::Config(e.to_string()))?;
        Ok(Self { cfg, client, journal: None })
    }

    /// Appends one JSON line per attempt to `path`.
    pub fn with_journal(mut self, path: impl AsRef<Path>) -> Result<Self, GeneratorError> {
        self.journal = Some(OpenOptions::new().create(true).append(true).open(path)?);
        Ok(self)
    }

    fn record(&mut self, entry: Value) -> Result<(), GeneratorError> {
        if let Some(file) = &mut self.journal {
            writeln!(file, "{entry}")?;
            file.flush()?;
        }
        Ok(())
    }

    fn attempt(&self, body: &Value) -> Attempt {
        let mut req = self.client.post(self.cfg.endpoint()).json(body);
        if let Some(key) = &self.cfg.api_key {
            req = req.bearer_auth(key);
        }
        let resp = match req.send() {
            Ok(r) => r,
            Err(e) => return Attempt::Retry(e.to_string()),
        };
        let status = resp.status();
        let text = match resp.text() {
            Ok(t) => t,
            Err(e) => return Attempt::Retry(e.to_string()),
        };
        if status == StatusCode::TOO_MANY_REQUESTS || status.is_server_error() {
            return Attempt::Retry(format!("HTTP {status}: {text}"));
        }
        if !status.is_success() {
            return Attempt::Fatal(GeneratorError::Rejected { status: status.as_u16(), body: text });
        }
        let content = serde_json::from_str::<Value>(&text)
            .ok()
            .and_then(|v| v.pointer("/choices/0/message/content").and_then(Value::as_str).map(str::to_string));
        match content {
            Some(c) => Attempt::Done(c),
            None => Attempt::Retry(format!("malformed completion: {text}")),
        }
    }
}

impl Generator for RemoteGenerator {
    fn generate(&mut self, req: &GeneratorRequest) -> Result<Reply, GeneratorError> {
        let prompt = render_prompt(req);
        let body = json!({
            "model": self.cfg.model,
            "temperature": self.cfg.temperature,
            "messages": [
                { "role": "system", "content": prompt.system },
                { "role": "user", "content": prompt.user },
            ],
        });
        let mut last = String::new();
        for attempt in 0..=self.cfg.max_retries {
            if attempt > 0 {
                thread::sleep(self.cfg.delay(attempt - 1));
            }
            let outcome = self.attempt(&body);
            let (status, detail) = match &outcome {
                Attempt::Done(c) => ("ok", c.clone()),
                Attempt::Retry(e) => ("retry", e.clone()),
                Attempt::Fatal(e) => ("rejected", e.to_string()),
            };
            self.record(json!({
                "timestamp_ms": now_ms() as u64,
                "attempt": attempt + 1,
                "kind": req.kind,
                "template": req.template_id,
                "request": body,
                "status": status,
                "response": detail,
            }))?;
            match outcome {
                Attempt::Done(content) => return Ok(extract_reply(&content)),
                Attempt::Fatal(e) => return Err(e),
                Attempt::Retry(e) => {
                    log::warn!("generator attempt {} failed: {e}", attempt + 1);
                    last = e;
                }
            }
        }
        Err(GeneratorError::Unreachable { attempts: self.cfg.max_retries + 1, last })
    }

    fn name(&self) -> String {
        format!("remote({})", self.cfg.model)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn backoff_doubles_and_caps() {
        let cfg = RemoteConfig::new("http://x/v1/", "m");
        assert_eq!(cfg.endpoint(), "http://x/v1/chat/completions");
        assert_eq!(cfg.delay(0), Duration::from_millis(500));
        assert_eq!(cfg.delay(2), Duration::from_secs(2));
        assert_eq!(cfg.delay(20), Duration::from_secs(30));
    }
}
