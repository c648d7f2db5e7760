//! Record/replay cache: an append-only JSONL file mapping request hashes
//! to responses, so model-backed runs can be re-executed offline.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::client::{ChatClient, ChatError, ChatRequest, ChatResponse};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CacheMode {
    /// Serve hits, call the inner client on misses and append them.
    Record,
    /// Serve hits only; a miss is an error.
    Replay,
}

#[derive(Serialize, Deserialize)]
struct Entry {
    hash: String,
    model: String,
    response: ChatResponse,
}

/// Hex SHA-256 of the request's canonical JSON. The model name is part
/// of the request, so providers never share entries.
pub fn request_hash(request: &ChatRequest) -> String {
    // serde_json maps keep sorted keys, which makes this form canonical
    let canonical = serde_json::to_value(request).expect("request serializes").to_string();
    hex::encode(Sha256::digest(canonical.as_bytes()))
}

pub struct ReplayCache {
    mode: CacheMode,
    path: PathBuf,
    inner: Option<Box<dyn ChatClient>>,
    state: Mutex<State>,
}

struct State {
    entries: HashMap<String, ChatResponse>,
    file: Option<File>,
}

fn load(path: &Path) -> Result<HashMap<String, ChatResponse>, ChatError> {
    let mut entries = HashMap::new();
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(entries),
        Err(e) => return Err(ChatError::Io(e.to_string())),
    };
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| ChatError::Io(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let entry: Entry =
            serde_json::from_str(&line).map_err(|e| ChatError::CacheCorrupt { line: i + 1, reason: e.to_string() })?;
        entries.insert(entry.hash, entry.response);
    }
    Ok(entries)
}

impl ReplayCache {
    /// Opens `path` for replay. The file must exist.
    pub fn replay(path: impl Into<PathBuf>) -> Result<Self, ChatError> {
        let path = path.into();
        if !path.exists() {
            return Err(ChatError::Io(format!("{} does not exist", path.display())));
        }
        let entries = load(&path)?;
        Ok(ReplayCache { mode: CacheMode::Replay, path, inner: None, state: Mutex::new(State { entries, file: None }) })
    }

    /// Opens `path` for recording through `inner`, keeping existing entries.
    pub fn record(path: impl Into<PathBuf>, inner: Box<dyn ChatClient>) -> Result<Self, ChatError> {
        let path = path.into();
        let entries = load(&path)?;
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&path)
            .map_err(|e| ChatError::Io(e.to_string()))?;
        Ok(ReplayCache {
            mode: CacheMode::Record,
            path,
            inner: Some(inner),
            state: Mutex::new(State { entries, file: Some(file) }),
        })
    }

    pub fn mode(&self) -> CacheMode {
        self.mode
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn len(&self) -> usize {
        self.state.lock().expect("lock").entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl ChatClient for ReplayCache {
    fn complete(&self, request: &ChatRequest) -> Result<ChatResponse, ChatError> {
        let hash = request_hash(request);
        if let Some(hit) = self.state.lock().expect("lock").entries.get(&hash) {
            return Ok(hit.clone());
        }
        let inner = match (&self.inner, self.mode) {
            (Some(inner), CacheMode::Record) => inner,
            _ => return Err(ChatError::ReplayMiss { hash }),
        };
        // the call runs unlocked so concurrent misses do not serialize
        let response = inner.complete(request)?;
        let mut state = self.state.lock().expect("lock");
        if let Some(existing) = state.entries.get(&hash) {
            return Ok(existing.clone());
        }
        let line = serde_json::to_string(&Entry { hash: hash.clone(), model: request.model.clone(), response: response.clone() })
            .expect("entry serializes");
        let file = state.file.as_mut().expect("record mode has a file");
        writeln!(file, "{line}").and_then(|_| file.flush()).map_err(|e| ChatError::Io(e.to_string()))?;
        state.entries.insert(hash, response.clone());
        Ok(response)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::client::{ChatMessage, ScriptedClient};

    fn req(model: &str, text: &str) -> ChatRequest {
        ChatRequest { model: model.into(), messages: vec![ChatMessage::user(text)], temperature: 0.7, max_tokens: 64 }
    }

    #[test]
    fn hash_covers_model_and_messages() {
        let a = request_hash(&req("gpt", "hi"));
        assert_eq!(a, request_hash(&req("gpt", "hi")));
        assert_ne!(a, request_hash(&req("gemini", "hi")));
        assert_ne!(a, request_hash(&req("gpt", "hi!")));
        assert_eq!(a.len(), 64);
    }

    #[test]
    fn record_then_replay() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.jsonl");
        let rec = ReplayCache::record(&path, Box::new(ScriptedClient::new(["alpha", "beta"]))).unwrap();
        assert_eq!(rec.complete(&req("m", "1")).unwrap().text, "alpha");
        assert_eq!(rec.complete(&req("m", "1")).unwrap().text, "alpha");
        assert_eq!(rec.complete(&req("m", "2")).unwrap().text, "beta");
        drop(rec);

        let rep = ReplayCache::replay(&path).unwrap();
        assert_eq!(rep.len(), 2);
        assert_eq!(rep.complete(&req("m", "2")).unwrap().text, "beta");
        let miss = rep.complete(&req("m", "3")).unwrap_err();
        assert!(matches!(miss, ChatError::ReplayMiss { .. }));
        assert!(miss.is_fatal());
    }

    #[test]
    fn corrupt_line_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.jsonl");
        std::fs::write(&path, "\n{not json}\n").unwrap();
        match ReplayCache::replay(&path) {
            Err(ChatError::CacheCorrupt { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected corruption, got {:?}", other.err()),
        }
    }

    #[test]
    fn replay_requires_file() {
        assert!(ReplayCache::replay("/nonexistent/cache.jsonl").is_err());
    }
}
