use std::collections::BTreeMap;
use std::sync::Arc;

use super::method::{AxisMethod, OrthMethod, TraceFormula};
use crate::error::{Error, Result};

/// Ortholength methods selectable by name.
#[derive(Clone)]
pub struct MethodRegistry {
    methods: BTreeMap<String, Arc<dyn OrthMethod>>,
}

impl Default for MethodRegistry {
    fn default() -> Self {
        let mut r = MethodRegistry::empty();
        r.register(TraceFormula);
        r.register(AxisMethod);
        r
    }
}

impl MethodRegistry {
    pub fn empty() -> Self {
        MethodRegistry {
            methods: BTreeMap::new(),
        }
    }

    /// Adds `method` under its own name, replacing any previous entry.
    pub fn register<M: OrthMethod + 'static>(&mut self, method: M) {
        self.methods
            .insert(method.name().to_string(), Arc::new(method));
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn OrthMethod>> {
        self.methods
            .get(name)
            .cloned()
            .ok_or_else(|| Error::UnknownMethod(name.to_string()))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.methods.keys().map(String::as_str)
    }
}

impl std::fmt::Debug for MethodRegistry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(self.names()).finish()
    }
}
