//! In-process stub endpoint speaking the scorer wire contract over real
//! HTTP on a loopback socket. Used by the test suites and by end-to-end
//! pipeline runs that must be reproducible without model inference.

use std::io::{BufRead, BufReader, Read, Write};
use std::net::{SocketAddr, TcpListener, TcpStream};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Arc;
use std::thread::JoinHandle;

use serde_json::{json, Value};

/// Response a stub responder returns for one request.
pub struct StubReply {
    pub status: u16,
    pub body: String,
}

impl StubReply {
    pub fn json(value: Value) -> Self {
        StubReply {
            status: 200,
            body: value.to_string(),
        }
    }

    pub fn status(code: u16, message: &str) -> Self {
        StubReply {
            status: code,
            body: json!({"message": message}).to_string(),
        }
    }
}

/// A tiny single-threaded HTTP/1.1 server; each request is answered by the
/// responder with the request body and a global hit counter.
pub struct StubServer {
    addr: SocketAddr,
    hits: Arc<AtomicU64>,
    shutdown: Arc<AtomicBool>,
    handle: Option<JoinHandle<()>>,
}

impl StubServer {
    pub fn start<F>(responder: F) -> StubServer
    where
        F: Fn(u64, &Value) -> StubReply + Send + Sync + 'static,
    {
        Self::start_on("127.0.0.1:0", responder).expect("bind loopback")
    }

    pub fn start_on<F>(addr: &str, responder: F) -> std::io::Result<StubServer>
    where
        F: Fn(u64, &Value) -> StubReply + Send + Sync + 'static,
    {
        let listener = TcpListener::bind(addr)?;
        let addr = listener.local_addr().unwrap();
        let hits = Arc::new(AtomicU64::new(0));
        let shutdown = Arc::new(AtomicBool::new(false));

        let thread_hits = Arc::clone(&hits);
        let thread_shutdown = Arc::clone(&shutdown);
        let handle = std::thread::spawn(move || {
            for stream in listener.incoming() {
                if thread_shutdown.load(Ordering::SeqCst) {
                    break;
                }
                let Ok(stream) = stream else { continue };
                let hit = thread_hits.fetch_add(1, Ordering::SeqCst);
                let _ = handle_connection(stream, hit, &responder);
            }
        });

        Ok(StubServer {
            addr,
            hits,
            shutdown,
            handle: Some(handle),
        })
    }

    pub fn url(&self) -> String {
        format!("http://{}", self.addr)
    }

    /// Number of requests served so far.
    pub fn hits(&self) -> u64 {
        self.hits.load(Ordering::SeqCst)
    }
}

impl Drop for StubServer {
    fn drop(&mut self) {
        self.shutdown.store(true, Ordering::SeqCst);
        // unblock accept()
        let _ = TcpStream::connect(self.addr);
        if let Some(handle) = self.handle.take() {
            let _ = handle.join();
        }
    }
}

fn handle_connection<F>(mut stream: TcpStream, hit: u64, responder: &F) -> std::io::Result<()>
where
    F: Fn(u64, &Value) -> StubReply,
{
    let mut reader = BufReader::new(stream.try_clone()?);
    let mut content_length = 0usize;
    let mut line = String::new();
    loop {
        line.clear();
        if reader.read_line(&mut line)? == 0 {
            return Ok(()); // peer closed (e.g. the shutdown poke)
        }
        let trimmed = line.trim();
        if trimmed.is_empty() {
            break;
        }
        if let Some(value) = trimmed
            .to_ascii_lowercase()
            .strip_prefix("content-length:")
            .map(str::trim)
            .and_then(|v| v.parse::<usize>().ok())
        {
            content_length = value;
        }
    }
    let mut body = vec![0u8; content_length];
    reader.read_exact(&mut body)?;
    let request: Value = serde_json::from_slice(&body).unwrap_or(Value::Null);

    let reply = responder(hit, &request);
    let reason = match reply.status {
        200 => "OK",
        413 => "Payload Too Large",
        429 => "Too Many Requests",
        500 => "Internal Server Error",
        503 => "Service Unavailable",
        _ => "Status",
    };
    let response = format!(
        "HTTP/1.1 {} {}\r\ncontent-type: application/json\r\ncontent-length: {}\r\nconnection: close\r\n\r\n{}",
        reply.status,
        reason,
        reply.body.len(),
        reply.body
    );
    stream.write_all(response.as_bytes())?;
    stream.flush()?;
    Ok(())
}

/// Stable 64-bit FNV-1a hash, independent of std hasher internals.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

fn unit_hash(key: &str) -> f64 {
    (fnv1a(key.as_bytes()) % 1_000_000) as f64 / 1_000_000.0
}

/// Deterministic responder covering all three request shapes.
///
/// Texts containing stock AI phrasing get systematically higher token
/// log-probabilities (lower perplexity) and more AI-leaning judge logits,
/// so stubbed pipelines produce discriminative, reproducible scores.
pub fn default_responder(hit: u64, request: &Value) -> StubReply {
    let _ = hit;
    if request.get("echo_logprobs").is_some() {
        let text = request["text"].as_str().unwrap_or("");
        return StubReply::json(logprob_response(text));
    }
    if request.get("yes_no_logits").is_some() {
        let text = request["text"].as_str().unwrap_or("");
        let (yes, no) = yes_no_logits_for(text);
        return StubReply::json(json!({"yes_logit": yes, "no_logit": no}));
    }
    if let Some(prompt) = request.get("prompt").and_then(Value::as_str) {
        return StubReply::json(json!({"generated": generation_for(prompt)}));
    }
    StubReply::status(400, "unrecognized request shape")
}

/// Answer generation requests by prompt shape: rubric prompts get seven
/// dimension scores plus an AI_SCORE tag, chain-of-thought prompts get an
/// AI_CONFIDENCE/VERDICT tail, anything else is treated as a rewrite.
fn generation_for(prompt: &str) -> String {
    let ai_like = looks_generated(prompt);
    let u = unit_hash(prompt);
    if prompt.contains("AI_SCORE") {
        let base = if ai_like { 6.0 } else { 1.0 };
        let dims: Vec<u32> = (0..7)
            .map(|i| {
                let wobble = unit_hash(&format!("{u}\u{1}{i}")) * 3.0;
                (base + wobble).round().min(10.0) as u32
            })
            .collect();
        let mean_x10 = (dims.iter().sum::<u32>() as f64 / 7.0 * 10.0).round() as u32;
        let line: Vec<String> = dims
            .iter()
            .enumerate()
            .map(|(i, d)| format!("{}:{d}", i + 1))
            .collect();
        format!("{}\nAI_SCORE: {mean_x10}", line.join(" "))
    } else if prompt.contains("AI_CONFIDENCE") {
        let confidence = if ai_like {
            6.0 + (u * 4.0).round()
        } else {
            (u * 4.0).round()
        };
        let verdict = if ai_like { "yes" } else { "no" };
        format!("stylistic observations...\nAI_CONFIDENCE: {confidence}\nVERDICT: {verdict}")
    } else {
        rewrite_of(prompt)
    }
}

fn looks_generated(text: &str) -> bool {
    let lowered = text.to_lowercase();
    [
        "it is worth noting",
        "in summary",
        "in conclusion",
        "furthermore",
    ]
    .iter()
    .any(|p| lowered.contains(p))
}

/// Whitespace tokens with hash-derived conditional log-probabilities.
pub fn logprob_response(text: &str) -> Value {
    let ai_like = looks_generated(text);
    let tokens: Vec<&str> = text.split_whitespace().collect();
    let logprobs: Vec<f64> = tokens
        .iter()
        .enumerate()
        .map(|(i, tok)| {
            let u = unit_hash(&format!("{tok}\u{1}{i}"));
            let base = -0.2 - 3.0 * u;
            if ai_like {
                base * 0.3
            } else {
                base
            }
        })
        .collect();
    json!({"tokens": tokens, "logprobs": logprobs})
}

fn yes_no_logits_for(prompt: &str) -> (f64, f64) {
    let u = unit_hash(prompt);
    // honor the prompt's polarity legend so swapped questions read right
    let yes_means_human =
        prompt.contains("yes = human-written") || prompt.contains("yes = written by a human");
    let votes_ai = looks_generated(prompt);
    let lean = if votes_ai != yes_means_human {
        1.5
    } else {
        -1.5
    };
    (lean + u, -(lean + u))
}

fn rewrite_of(prompt: &str) -> String {
    // the rewriter stub echoes the prompt payload with a marker prefix
    format!("rewritten: {prompt}")
}
