//! Cross-module checks: randomized invariants and frozen reference values.

mod cross_checks;
mod properties;
