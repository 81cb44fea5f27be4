//! Benchmarks for the series kernel, the Picard engine and the trapezoid oracle.

use std::path::{Path, PathBuf};

use vie_core::expr::{parse_document, split_kernel, Header};
use vie_core::Equation;

pub const CORPUS: [&str; 4] = ["shifted_cosine", "sine_difference", "tangent", "sine_of_unknown"];

pub fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../equations")
}

/// Loads `equations/<name>.vie` with its header.
pub fn load(name: &str) -> (Header, Equation) {
    let path = corpus_dir().join(format!("{name}.vie"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    let doc = parse_document(&text).expect("corpus parses");
    let mut eq = split_kernel(&doc.rhs).expect("corpus is separable");
    eq.label = name.to_string();
    (doc.header, eq)
}

#[cfg(test)]
mod tests {
    #[test]
    fn corpus_loads() {
        for name in super::CORPUS {
            let (header, eq) = super::load(name);
            assert!(header.order.is_some() && eq.has_integral(), "{name}");
        }
    }
}
