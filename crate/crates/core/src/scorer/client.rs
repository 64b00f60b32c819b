//! HTTP client for scorer endpoints: token log-probabilities, yes/no
//! judge logits, and text generation, with bounded retries and a
//! fixed-size worker pool for batch jobs.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use serde_json::{json, Value};

use crate::error::{EndpointError, Error, Result};

use super::{ScorerEndpoint, TokenLogProbs};

/// Retry schedule for transient endpoint failures: attempt n sleeps
/// base_delay * 2^(n-1) before the next try. No jitter, so batch runs are
/// reproducible.
#[derive(Debug, Clone)]
pub struct RetryPolicy {
    pub max_attempts: u32,
    pub base_delay: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy {
            max_attempts: 4,
            base_delay: Duration::from_millis(500),
        }
    }
}

/// Generation knobs carried on the wire; the harness does not assume the
/// endpoint honors temperature/seed, it only persists what was requested.
#[derive(Debug, Clone)]
pub struct GenerationParams {
    pub max_new_tokens: u32,
    pub temperature: f64,
    pub seed: u64,
}

impl Default for GenerationParams {
    fn default() -> Self {
        GenerationParams {
            max_new_tokens: 400,
            temperature: 0.0,
            seed: 0,
        }
    }
}

/// The three request shapes every scorer endpoint must answer.
pub trait ScorerClient: Send + Sync {
    /// `{"model", "text", "echo_logprobs": true}` -> `{"tokens", "logprobs"}`.
    fn token_logprobs(&self, sample_id: &str, text: &str) -> Result<TokenLogProbs>;

    /// `{"model", "text", "yes_no_logits": true}` -> `{"yes_logit", "no_logit"}`.
    fn yes_no_logits(&self, prompt: &str) -> Result<(f64, f64)>;

    /// `{"model", "prompt", "max_new_tokens", "temperature", "seed"}` ->
    /// `{"generated"}`.
    fn generate(&self, prompt: &str, params: &GenerationParams) -> Result<String>;

    /// Upper bound on concurrent in-flight requests for batch drivers.
    fn max_in_flight(&self) -> usize {
        1
    }
}

enum CallFailure {
    Transient(String),
    Permanent(EndpointError),
}

pub struct HttpScorerClient {
    endpoint: ScorerEndpoint,
    retry: RetryPolicy,
    http: reqwest::blocking::Client,
}

impl HttpScorerClient {
    pub fn new(endpoint: ScorerEndpoint, retry: RetryPolicy) -> Result<Self> {
        endpoint.validate()?;
        // endpoints answer one request per connection; never reuse sockets
        let http = reqwest::blocking::Client::builder()
            .timeout(endpoint.timeout())
            .connect_timeout(endpoint.timeout())
            .pool_max_idle_per_host(0)
            .build()
            .map_err(|e| {
                Error::Endpoint(EndpointError::Transport {
                    attempts: 0,
                    message: e.to_string(),
                })
            })?;
        Ok(HttpScorerClient {
            endpoint,
            retry,
            http,
        })
    }

    pub fn endpoint(&self) -> &ScorerEndpoint {
        &self.endpoint
    }

    fn post_once(&self, body: &Value) -> std::result::Result<Value, CallFailure> {
        let mut request = self.http.post(&self.endpoint.base_url).json(body);
        if let Some(token) = &self.endpoint.auth_token {
            request = request.bearer_auth(token);
        }
        let response = request
            .send()
            .map_err(|e| CallFailure::Transient(e.to_string()))?;
        let status = response.status();
        let text = response
            .text()
            .map_err(|e| CallFailure::Transient(e.to_string()))?;

        if status.as_u16() == 413 {
            return Err(CallFailure::Permanent(EndpointError::ContextOverflow(text)));
        }
        if status.is_server_error() || status.as_u16() == 429 {
            return Err(CallFailure::Transient(format!("HTTP {status}: {text}")));
        }
        if !status.is_success() {
            return Err(CallFailure::Permanent(EndpointError::Malformed(format!(
                "HTTP {status}: {text}"
            ))));
        }
        let value: Value = serde_json::from_str(&text).map_err(|e| {
            CallFailure::Permanent(EndpointError::Malformed(format!("bad JSON: {e}")))
        })?;
        if let Some(err) = value.get("error") {
            let kind = err.get("type").and_then(Value::as_str).unwrap_or("");
            let message = err
                .get("message")
                .and_then(Value::as_str)
                .unwrap_or("endpoint error")
                .to_string();
            return Err(if kind == "context_overflow" {
                CallFailure::Permanent(EndpointError::ContextOverflow(message))
            } else {
                CallFailure::Permanent(EndpointError::Malformed(message))
            });
        }
        Ok(value)
    }

    /// Retry transient failures with exponential backoff; returns the
    /// response and how many attempts it took.
    fn post_with_retry(&self, body: &Value) -> Result<(Value, u32)> {
        let mut last = String::new();
        for attempt in 1..=self.retry.max_attempts {
            match self.post_once(body) {
                Ok(value) => return Ok((value, attempt)),
                Err(CallFailure::Permanent(e)) => return Err(e.into()),
                Err(CallFailure::Transient(message)) => {
                    last = message;
                    if attempt < self.retry.max_attempts {
                        std::thread::sleep(self.retry.base_delay * 2u32.pow(attempt - 1));
                    }
                }
            }
        }
        Err(EndpointError::Transport {
            attempts: self.retry.max_attempts,
            message: last,
        }
        .into())
    }
}

fn f64_field(value: &Value, field: &str) -> Result<f64> {
    value
        .get(field)
        .and_then(Value::as_f64)
        .ok_or_else(|| EndpointError::Malformed(format!("missing numeric field {field:?}")).into())
}

impl ScorerClient for HttpScorerClient {
    fn token_logprobs(&self, sample_id: &str, text: &str) -> Result<TokenLogProbs> {
        let body = json!({
            "model": self.endpoint.model_id,
            "text": text,
            "echo_logprobs": true,
        });
        let (value, _attempts) = self.post_with_retry(&body)?;
        let tokens: Vec<String> = value
            .get("tokens")
            .and_then(Value::as_array)
            .ok_or_else(|| EndpointError::Malformed("missing tokens array".into()))?
            .iter()
            .map(|t| {
                t.as_str()
                    .map(String::from)
                    .ok_or_else(|| EndpointError::Malformed("non-string token".into()))
            })
            .collect::<std::result::Result<_, _>>()?;
        let logprobs: Vec<f64> = value
            .get("logprobs")
            .and_then(Value::as_array)
            .ok_or_else(|| EndpointError::Malformed("missing logprobs array".into()))?
            .iter()
            .map(|v| {
                v.as_f64()
                    .ok_or_else(|| EndpointError::Malformed("non-numeric logprob".into()))
            })
            .collect::<std::result::Result<_, _>>()?;
        TokenLogProbs::new(sample_id, tokens, logprobs)
    }

    fn yes_no_logits(&self, prompt: &str) -> Result<(f64, f64)> {
        let body = json!({
            "model": self.endpoint.model_id,
            "text": prompt,
            "yes_no_logits": true,
        });
        let (value, _) = self.post_with_retry(&body)?;
        Ok((
            f64_field(&value, "yes_logit")?,
            f64_field(&value, "no_logit")?,
        ))
    }

    fn generate(&self, prompt: &str, params: &GenerationParams) -> Result<String> {
        let body = json!({
            "model": self.endpoint.model_id,
            "prompt": prompt,
            "max_new_tokens": params.max_new_tokens,
            "temperature": params.temperature,
            "seed": params.seed,
        });
        let (value, _) = self.post_with_retry(&body)?;
        value
            .get("generated")
            .and_then(Value::as_str)
            .map(String::from)
            .ok_or_else(|| EndpointError::Malformed("missing generated field".into()).into())
    }

    fn max_in_flight(&self) -> usize {
        self.endpoint.max_in_flight
    }
}

/// Run `work` over `items` on a fixed pool of `workers` threads.
///
/// Results come back in input order; per-item failures are per-item
/// `Err` values, never a batch abort.
pub fn run_batch<I, T, F>(items: &[I], workers: usize, work: F) -> Vec<Result<T>>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> Result<T> + Sync,
{
    let workers = workers.max(1).min(items.len().max(1));
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<Result<T>>>> = items.iter().map(|_| Mutex::new(None)).collect();

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let idx = next.fetch_add(1, Ordering::Relaxed);
                if idx >= items.len() {
                    break;
                }
                let result = work(&items[idx]);
                *slots[idx].lock().unwrap() = Some(result);
            });
        }
    });

    slots
        .into_iter()
        .map(|slot| {
            slot.into_inner()
                .unwrap()
                .expect("worker filled every slot")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scorer::stub::{StubReply, StubServer};

    fn client_for(server: &StubServer, retry: RetryPolicy) -> HttpScorerClient {
        let endpoint = ScorerEndpoint::new(server.url(), "stub-model");
        HttpScorerClient::new(endpoint, retry).unwrap()
    }

    fn fast_retry(max_attempts: u32) -> RetryPolicy {
        RetryPolicy {
            max_attempts,
            base_delay: Duration::from_millis(1),
        }
    }

    #[test]
    fn passthrough_logprobs() {
        let server = StubServer::start(|_, _| {
            StubReply::json(serde_json::json!({
                "tokens": ["a", "b"],
                "logprobs": [-1.5, -0.25],
            }))
        });
        let client = client_for(&server, fast_retry(2));
        let lp = client.token_logprobs("s1", "a b").unwrap();
        assert_eq!(lp.tokens, vec!["a", "b"]);
        assert_eq!(lp.logprobs, vec![-1.5, -0.25]);
    }

    #[test]
    fn mismatched_lengths_are_malformed() {
        let server = StubServer::start(|_, _| {
            StubReply::json(serde_json::json!({
                "tokens": ["a", "b", "c"],
                "logprobs": [-1.0],
            }))
        });
        let client = client_for(&server, fast_retry(2));
        let err = client.token_logprobs("s1", "x").unwrap_err();
        assert!(matches!(err, Error::Endpoint(EndpointError::Malformed(_))));
        assert_eq!(server.hits(), 1, "malformed responses are not retried");
    }

    #[test]
    fn three_transient_failures_then_success() {
        let server = StubServer::start(|hit, _| {
            if hit < 3 {
                StubReply::status(503, "busy")
            } else {
                StubReply::json(serde_json::json!({
                    "tokens": ["x"],
                    "logprobs": [-0.5],
                }))
            }
        });
        let client = client_for(&server, fast_retry(4));
        let lp = client.token_logprobs("s1", "x").unwrap();
        assert_eq!(lp.logprobs, vec![-0.5]);
        assert_eq!(server.hits(), 4);
    }

    #[test]
    fn exhausted_retries_report_attempts() {
        let server = StubServer::start(|_, _| StubReply::status(500, "down"));
        let client = client_for(&server, fast_retry(3));
        let err = client.token_logprobs("s1", "x").unwrap_err();
        match err {
            Error::Endpoint(EndpointError::Transport { attempts, .. }) => {
                assert_eq!(attempts, 3)
            }
            other => panic!("unexpected {other}"),
        }
        assert_eq!(server.hits(), 3);
    }

    #[test]
    fn context_overflow_is_permanent() {
        let server = StubServer::start(|_, _| {
            StubReply::json(serde_json::json!({
                "error": {"type": "context_overflow", "message": "too long"},
            }))
        });
        let client = client_for(&server, fast_retry(4));
        let err = client.token_logprobs("s1", "x").unwrap_err();
        assert!(matches!(
            err,
            Error::Endpoint(EndpointError::ContextOverflow(_))
        ));
        assert_eq!(server.hits(), 1);
    }

    #[test]
    fn yes_no_and_generate_round_trip() {
        let server = StubServer::start(|_, request| {
            if request.get("yes_no_logits").is_some() {
                StubReply::json(serde_json::json!({"yes_logit": 2.0, "no_logit": -1.0}))
            } else {
                let prompt = request["prompt"].as_str().unwrap_or("");
                StubReply::json(serde_json::json!({
                    "generated": format!("echo: {prompt}")
                }))
            }
        });
        let client = client_for(&server, fast_retry(2));
        assert_eq!(client.yes_no_logits("judge this").unwrap(), (2.0, -1.0));
        let out = client
            .generate("rewrite this", &GenerationParams::default())
            .unwrap();
        assert_eq!(out, "echo: rewrite this");
    }

    #[test]
    fn run_batch_keeps_order_and_isolates_failures() {
        let items: Vec<u32> = (0..20).collect();
        let results = run_batch(&items, 4, |&i| {
            if i % 7 == 3 {
                Err(Error::InvalidInput(format!("boom {i}")))
            } else {
                Ok(i * 2)
            }
        });
        assert_eq!(results.len(), 20);
        for (i, r) in results.iter().enumerate() {
            if i % 7 == 3 {
                assert!(r.is_err());
            } else {
                assert_eq!(*r.as_ref().unwrap(), (i as u32) * 2);
            }
        }
    }
}
