use std::num::NonZeroUsize;
use std::sync::{Arc, Mutex};

use lru::LruCache;

use crate::api::SessionScenario;

pub const REGISTRY_CAPACITY: usize = 256;

/// In-memory scenario store with least-recently-used eviction.
pub struct Registry {
    inner: Mutex<LruCache<String, Arc<SessionScenario>>>,
}

impl Registry {
    pub fn new(capacity: usize) -> Self {
        let cap = NonZeroUsize::new(capacity).unwrap_or(NonZeroUsize::MIN);
        Self {
            inner: Mutex::new(LruCache::new(cap)),
        }
    }

    /// Returns the stored scenario under `id`, building and storing it first
    /// if absent. Payloads are never replaced once stored.
    pub fn get_or_insert<E>(
        &self,
        id: &str,
        build: impl FnOnce() -> Result<SessionScenario, E>,
    ) -> Result<Arc<SessionScenario>, E> {
        let mut map = self.inner.lock().expect("registry lock");
        if let Some(found) = map.get(id) {
            return Ok(found.clone());
        }
        let fresh = Arc::new(build()?);
        map.put(id.to_string(), fresh.clone());
        Ok(fresh)
    }

    pub fn get(&self, id: &str) -> Option<Arc<SessionScenario>> {
        self.inner.lock().expect("registry lock").get(id).cloned()
    }

    pub fn len(&self) -> usize {
        self.inner.lock().expect("registry lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
