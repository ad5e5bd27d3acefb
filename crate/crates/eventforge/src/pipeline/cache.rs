//! Query caching, rate limiting, and the pluggable transport layer.
//!
//! Every knowledge-graph query funnels through [`cached_query`]: the
//! cache is consulted first (key = MD5 of endpoint and query), then a
//! per-endpoint token bucket gates the actual network call, which is
//! retried with exponential backoff before giving up.
//!
//! The transport is a trait so tests and offline runs never open a
//! socket: [`StaticTransport`] serves canned bodies and records the
//! call log; [`NoNetwork`] fails every request (the default in this
//! build, which performs no live HTTP).

use std::io;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use md5::{Digest, Md5};

// ===== Errors =====

#[derive(Debug, thiserror::Error)]
pub enum QueryError {
    /// The request failed on every attempt (initial try + 3 retries).
    #[error("network error talking to {endpoint}: {reason}")]
    NetworkError { endpoint: String, reason: String },
    /// No token became available within the limiter's patience.
    #[error("rate limit wait exceeded {0:?}")]
    RateLimitTimeout(Duration),
    /// Offline operation was requested and the cache has no entry.
    #[error("offline: no cached response for this query (key {key})")]
    OfflineMiss { key: String },
    #[error("cache I/O failure: {0}")]
    CacheIo(#[from] io::Error),
}

// ===== Transport =====

/// One blocking request to a knowledge endpoint. Implementations must
/// be safe to call from several threads at once.
pub trait Transport: Send + Sync {
    fn fetch(&self, endpoint: &str, query: &str) -> Result<String, String>;
}

/// A transport with the network cable unplugged. Live HTTP is out of
/// scope for this build; runs either hit the cache or use a stub.
#[derive(Debug, Default)]
pub struct NoNetwork;

impl Transport for NoNetwork {
    fn fetch(&self, _endpoint: &str, _query: &str) -> Result<String, String> {
        Err("no network transport configured".to_string())
    }
}

/// Test transport: canned responses keyed by (endpoint, query
/// substring), plus a log of every fetch in call order.
#[derive(Default)]
pub struct StaticTransport {
    responses: Vec<(String, String, String)>,
    log: Mutex<Vec<(String, String)>>,
}

impl StaticTransport {
    pub fn new() -> Self {
        Self::default()
    }

    /// Serve `body` for any query to `endpoint` containing `needle`.
    pub fn respond(mut self, endpoint: &str, needle: &str, body: &str) -> Self {
        self.responses
            .push((endpoint.to_string(), needle.to_string(), body.to_string()));
        self
    }

    /// Every (endpoint, query) pair fetched so far, in call order.
    pub fn calls(&self) -> Vec<(String, String)> {
        self.log.lock().unwrap().clone()
    }
}

impl Transport for StaticTransport {
    fn fetch(&self, endpoint: &str, query: &str) -> Result<String, String> {
        self.log
            .lock()
            .unwrap()
            .push((endpoint.to_string(), query.to_string()));
        for (ep, needle, body) in &self.responses {
            if ep == endpoint && query.contains(needle.as_str()) {
                return Ok(body.clone());
            }
        }
        Err(format!("no canned response for {endpoint}"))
    }
}

// ===== Cache =====

/// Cache key: lowercase hex MD5 of `endpoint ++ "\n" ++ query`.
pub fn cache_key(endpoint: &str, query: &str) -> String {
    let mut hasher = Md5::new();
    hasher.update(endpoint.as_bytes());
    hasher.update(b"\n");
    hasher.update(query.as_bytes());
    hex::encode(hasher.finalize())
}

/// One file per key under a directory; the file name is the MD5 hex
/// key and the body is the raw response. Writes go through a
/// temporary file and an atomic rename, so concurrent writers of the
/// same key settle on last-write-wins without torn reads.
#[derive(Debug, Clone)]
pub struct QueryCache {
    dir: PathBuf,
}

impl QueryCache {
    pub fn new(dir: impl AsRef<Path>) -> Self {
        QueryCache {
            dir: dir.as_ref().to_path_buf(),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path_for(&self, key: &str) -> PathBuf {
        self.dir.join(key)
    }

    pub fn get(&self, key: &str) -> Option<String> {
        std::fs::read_to_string(self.path_for(key)).ok()
    }

    pub fn put(&self, key: &str, body: &str) -> io::Result<()> {
        // Write-then-rename so readers only ever see complete bodies.
        // The temp name carries pid + a process-wide counter: pid alone
        // is shared by every thread, and two concurrent writers on one
        // temp path race each other's rename.
        static WRITER_SEQ: AtomicU64 = AtomicU64::new(0);
        std::fs::create_dir_all(&self.dir)?;
        let tmp = self.dir.join(format!(
            ".{}.tmp-{}-{}",
            key,
            std::process::id(),
            WRITER_SEQ.fetch_add(1, Ordering::Relaxed)
        ));
        std::fs::write(&tmp, body)?;
        std::fs::rename(&tmp, self.path_for(key))?;
        Ok(())
    }
}

// ===== Rate limiting =====

/// Token bucket with capacity one: requests to an endpoint are spaced
/// at least 1/rate seconds apart, however many threads are asking.
#[derive(Debug)]
pub struct TokenBucket {
    rate_per_sec: f64,
    patience: Duration,
    state: Mutex<BucketState>,
}

#[derive(Debug)]
struct BucketState {
    tokens: f64,
    last_refill: Instant,
}

impl TokenBucket {
    pub fn new(rate_per_sec: f64) -> Self {
        TokenBucket::with_patience(rate_per_sec, Duration::from_secs(60))
    }

    /// `patience` bounds the total time one acquire may wait.
    pub fn with_patience(rate_per_sec: f64, patience: Duration) -> Self {
        assert!(rate_per_sec > 0.0, "rate must be positive");
        TokenBucket {
            rate_per_sec,
            patience,
            state: Mutex::new(BucketState {
                tokens: 1.0,
                last_refill: Instant::now(),
            }),
        }
    }

    /// Block until a token is available, then take it.
    pub fn acquire(&self) -> Result<(), QueryError> {
        let start = Instant::now();
        loop {
            let wait = {
                let mut state = self.state.lock().unwrap();
                let now = Instant::now();
                let elapsed = now.duration_since(state.last_refill).as_secs_f64();
                state.tokens = (state.tokens + elapsed * self.rate_per_sec).min(1.0);
                state.last_refill = now;
                if state.tokens >= 1.0 {
                    state.tokens -= 1.0;
                    return Ok(());
                }
                Duration::from_secs_f64((1.0 - state.tokens) / self.rate_per_sec)
            };
            if start.elapsed() + wait > self.patience {
                return Err(QueryError::RateLimitTimeout(self.patience));
            }
            std::thread::sleep(wait);
        }
    }
}

// ===== The cached query =====

/// Backoff before retry `n` (0-based): 10ms, 20ms, 40ms.
const RETRIES: u32 = 3;
const BACKOFF_BASE_MS: u64 = 10;

/// Resolve a query: cache hit returns immediately; otherwise a
/// rate-limited network fetch (retried with exponential backoff) is
/// stored and returned. With `offline`, a miss is an error instead of
/// a network call.
pub fn cached_query(
    endpoint: &str,
    query: &str,
    cache: &QueryCache,
    limiter: &TokenBucket,
    transport: &dyn Transport,
    offline: bool,
) -> Result<CachedResponse, QueryError> {
    let key = cache_key(endpoint, query);
    if let Some(body) = cache.get(&key) {
        return Ok(CachedResponse {
            body,
            from_cache: true,
        });
    }
    if offline {
        return Err(QueryError::OfflineMiss { key });
    }
    let mut last_reason = String::new();
    for attempt in 0..=RETRIES {
        if attempt > 0 {
            let backoff = BACKOFF_BASE_MS << (attempt - 1);
            std::thread::sleep(Duration::from_millis(backoff));
        }
        limiter.acquire()?;
        match transport.fetch(endpoint, query) {
            Ok(body) => {
                cache.put(&key, &body)?;
                return Ok(CachedResponse {
                    body,
                    from_cache: false,
                });
            }
            Err(reason) => last_reason = reason,
        }
    }
    Err(QueryError::NetworkError {
        endpoint: endpoint.to_string(),
        reason: last_reason,
    })
}

/// A response body plus where it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CachedResponse {
    pub body: String,
    pub from_cache: bool,
}
