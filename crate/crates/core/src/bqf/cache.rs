use std::collections::HashMap;
use std::sync::RwLock;

use super::{class_structure, GroupStructure};
use crate::error::Result;

/// Memoized class-group structures keyed by discriminant. Shareable across
/// threads; concurrent misses on the same key may compute twice.
#[derive(Debug, Default)]
pub struct ClassGroupCache {
    map: RwLock<HashMap<i128, GroupStructure>>,
}

impl ClassGroupCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn structure(&self, d: i128) -> Result<GroupStructure> {
        if let Some(s) = self.map.read().expect("cache lock poisoned").get(&d) {
            return Ok(s.clone());
        }
        let s = class_structure(d)?;
        self.map.write().expect("cache lock poisoned").insert(d, s.clone());
        Ok(s)
    }

    /// Cached structure, without computing.
    pub fn get(&self, d: i128) -> Option<GroupStructure> {
        self.map.read().expect("cache lock poisoned").get(&d).cloned()
    }

    pub fn len(&self) -> usize {
        self.map.read().expect("cache lock poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
