//! Bundled expected values for genus 3, with a checksum guarding the file.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::graph_complex::{Multiplicity, ResultTable};
use crate::sym_rep::{Partition, Twist};

const GOLDEN_JSON: &str = include_str!("../data/golden.json");
const GOLDEN_SHA256: &str = include_str!("../data/golden.json.sha256");

#[derive(Debug, thiserror::Error)]
pub enum GoldenError {
    #[error("golden data checksum mismatch (expected {expected}, found {found})")]
    Checksum { expected: String, found: String },
    #[error("golden data is malformed: {0}")]
    Malformed(#[from] serde_json::Error),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GoldenCensus {
    pub two_connected: BTreeMap<String, usize>,
    pub weighted_stable: BTreeMap<String, usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FullEntry {
    pub n: usize,
    pub i: usize,
    pub character: Vec<Multiplicity>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IsotypicRow {
    pub n: usize,
    pub mults: Vec<i64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GoldenTable {
    pub description: String,
    pub census: GoldenCensus,
    pub full: Vec<FullEntry>,
    pub trivial: Vec<IsotypicRow>,
    pub sign: Vec<IsotypicRow>,
}

/// One disagreement between a computed table and the golden data.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub n: usize,
    pub i: i64,
    pub partition: Partition,
    pub expected: i64,
    pub computed: i64,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Parses the bundled data after checking its checksum.
pub fn load() -> Result<GoldenTable, GoldenError> {
    parse_checked(GOLDEN_JSON, GOLDEN_SHA256.trim())
}

pub fn parse_checked(text: &str, expected_sha256: &str) -> Result<GoldenTable, GoldenError> {
    let found = sha256_hex(text.as_bytes());
    if found != expected_sha256 {
        return Err(GoldenError::Checksum {
            expected: expected_sha256.to_string(),
            found,
        });
    }
    Ok(serde_json::from_str(text)?)
}

impl GoldenTable {
    pub fn full_rows(&self, n: usize) -> Vec<&FullEntry> {
        self.full.iter().filter(|e| e.n == n).collect()
    }

    pub fn max_full_n(&self) -> usize {
        self.full.iter().map(|e| e.n).max().unwrap_or(0)
    }

    pub fn isotypic(&self, twist: Twist, n: usize) -> Option<&[i64]> {
        let rows = match twist {
            Twist::Trivial => &self.trivial,
            Twist::Sign => &self.sign,
        };
        rows.iter().find(|r| r.n == n).map(|r| r.mults.as_slice())
    }

    pub fn max_isotypic_n(&self, twist: Twist) -> usize {
        let rows = match twist {
            Twist::Trivial => &self.trivial,
            Twist::Sign => &self.sign,
        };
        rows.iter().map(|r| r.n).max().unwrap_or(0)
    }

    /// Compares every irreducible in every degree of a genus-3 table with
    /// full characters. Degrees without a golden row must vanish.
    pub fn diff_full(&self, table: &ResultTable) -> Vec<Mismatch> {
        let n = table.n;
        let mut expected: BTreeMap<(i64, Partition), i64> = BTreeMap::new();
        for row in self.full_rows(n) {
            for m in &row.character {
                expected.insert((row.i as i64, m.partition.clone()), m.mult);
            }
        }
        let mut computed: BTreeMap<(i64, Partition), i64> = BTreeMap::new();
        for (&k, ms) in &table.degrees {
            for m in ms {
                computed.insert((table.i_index(k), m.partition.clone()), m.mult);
            }
        }
        let keys: std::collections::BTreeSet<_> =
            expected.keys().chain(computed.keys()).cloned().collect();
        keys.into_iter()
            .filter_map(|key| {
                let e = expected.get(&key).copied().unwrap_or(0);
                let c = computed.get(&key).copied().unwrap_or(0);
                (e != c).then_some(Mismatch {
                    n,
                    i: key.0,
                    partition: key.1,
                    expected: e,
                    computed: c,
                })
            })
            .collect()
    }

    /// Compares the trivial or sign multiplicity in every degree.
    pub fn diff_isotypic(&self, table: &ResultTable, twist: Twist) -> Vec<Mismatch> {
        let n = table.n;
        let lambda = match twist {
            Twist::Trivial => Partition::row(n),
            Twist::Sign => Partition::column(n),
        };
        let golden = self.isotypic(twist, n).unwrap_or(&[]);
        let mut out = Vec::new();
        let top = table.top_degree() as i64;
        for i in 0..=top {
            let e = golden.get(i as usize).copied().unwrap_or(0);
            let c = table.multiplicity((top - i) as usize, &lambda);
            if e != c {
                out.push(Mismatch {
                    n,
                    i,
                    partition: lambda.clone(),
                    expected: e,
                    computed: c,
                });
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_data_loads_and_is_consistent() {
        let g = load().unwrap();
        assert_eq!(g.max_full_n(), 9);
        assert_eq!(g.max_isotypic_n(Twist::Trivial), 13);
        assert_eq!(g.max_isotypic_n(Twist::Sign), 13);
        for e in &g.full {
            for m in &e.character {
                assert_eq!(m.partition.size(), e.n);
                assert!(m.mult > 0);
            }
            // the full rows contain the trivial and sign multiplicities
            let t = e
                .character
                .iter()
                .find(|m| m.partition == Partition::row(e.n))
                .map_or(0, |m| m.mult);
            let s = e
                .character
                .iter()
                .find(|m| m.partition == Partition::column(e.n))
                .map_or(0, |m| m.mult);
            assert_eq!(t, g.isotypic(Twist::Trivial, e.n).unwrap()[e.i]);
            assert_eq!(s, g.isotypic(Twist::Sign, e.n).unwrap()[e.i]);
        }
        assert_eq!(g.isotypic(Twist::Trivial, 8).unwrap(), &[1, 0, 1]);
        assert_eq!(g.isotypic(Twist::Sign, 8).unwrap(), &[0, 1, 0]);
    }

    #[test]
    fn tampering_is_detected() {
        let tampered = GOLDEN_JSON.replacen("\"mult\": 1", "\"mult\": 2", 1);
        assert!(matches!(
            parse_checked(&tampered, GOLDEN_SHA256.trim()),
            Err(GoldenError::Checksum { .. })
        ));
    }
}
