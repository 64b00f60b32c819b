//! Standalone deterministic stub endpoint: serves the full scorer wire
//! contract (logprobs, yes/no logits, generation) so the pipeline can run
//! end to end without any model.
//!
//! Usage: stub_server [addr]   (default 127.0.0.1:9000)

use deteval_core::scorer::stub::{default_responder, StubServer};

fn main() {
    let addr = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "127.0.0.1:9000".to_string());
    let server = StubServer::start_on(&addr, default_responder).expect("bind address");
    println!("stub scorer endpoint listening on {}", server.url());
    loop {
        std::thread::sleep(std::time::Duration::from_secs(3600));
    }
}
