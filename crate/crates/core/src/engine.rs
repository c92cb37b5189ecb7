//! Interchangeable ways of computing `pi_*` of the completion of a complex,
//! registered by name and chosen at run time.

use std::collections::BTreeMap;

use crate::abelian::{GradedTame, Prime};
use crate::complexes::{tower_oracle, ComplexError, FreeComplex, DEFAULT_STAGES};

pub trait CompletionEngine: Send + Sync {
    fn name(&self) -> &'static str;
    /// One line naming the computation path, printed in reports.
    fn provenance(&self) -> String;
    fn complete(&self, c: &FreeComplex, p: Prime) -> Result<GradedTame, ComplexError>;
}

/// `L_0 H_n (+) L_1 H_{n-1}` from the homology invariants.
pub struct SymbolicEngine;

impl CompletionEngine for SymbolicEngine {
    fn name(&self) -> &'static str {
        "symbolic"
    }

    fn provenance(&self) -> String {
        "symbolic: derived completion of homology".into()
    }

    fn complete(&self, c: &FreeComplex, p: Prime) -> Result<GradedTame, ComplexError> {
        c.complete(p)
    }
}

/// Inverse limit of `H_*(E//p^k)` over a finite stage budget.
pub struct TowerEngine {
    pub stages: usize,
}

impl CompletionEngine for TowerEngine {
    fn name(&self) -> &'static str {
        "tower"
    }

    fn provenance(&self) -> String {
        format!("tower: limit of H_*(E//p^k), k = 1..{}", self.stages)
    }

    fn complete(&self, c: &FreeComplex, p: Prime) -> Result<GradedTame, ComplexError> {
        tower_oracle(c, p, self.stages)
    }
}

pub struct EngineRegistry {
    engines: BTreeMap<&'static str, Box<dyn CompletionEngine>>,
}

impl EngineRegistry {
    pub fn empty() -> Self {
        EngineRegistry {
            engines: BTreeMap::new(),
        }
    }

    /// Both built-in engines, the tower engine with the given budget.
    pub fn with_stages(stages: usize) -> Self {
        let mut r = EngineRegistry::empty();
        r.register(Box::new(SymbolicEngine));
        r.register(Box::new(TowerEngine { stages }));
        r
    }

    pub fn register(&mut self, engine: Box<dyn CompletionEngine>) {
        self.engines.insert(engine.name(), engine);
    }

    pub fn get(&self, name: &str) -> Option<&dyn CompletionEngine> {
        self.engines.get(name).map(|e| e.as_ref())
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.engines.keys().copied()
    }
}

impl Default for EngineRegistry {
    fn default() -> Self {
        EngineRegistry::with_stages(DEFAULT_STAGES)
    }
}
