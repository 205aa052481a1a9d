use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{validate_poset, Point, Poset, PosetError};

/// On-disk form: cover relations only; the closure is rebuilt on load.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PosetFile {
    pub n: usize,
    pub cover: Vec<[Point; 2]>,
    #[serde(default)]
    pub labels: BTreeMap<Point, String>,
}

impl Serialize for Poset {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_file().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Poset {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let file = PosetFile::deserialize(d)?;
        Poset::from_file(&file).map_err(serde::de::Error::custom)
    }
}

impl Poset {
    pub fn to_file(&self) -> PosetFile {
        PosetFile {
            n: self.len(),
            cover: self.cover_pairs().into_iter().map(|(a, b)| [a, b]).collect(),
            labels: self.labels().clone(),
        }
    }

    pub fn from_file(file: &PosetFile) -> Result<Poset, PosetError> {
        let pairs: Vec<_> = file.cover.iter().map(|&[a, b]| (a, b)).collect();
        let mut p = validate_poset(file.n, &pairs)?;
        for (&k, v) in &file.labels {
            if k >= file.n {
                return Err(PosetError::Format(format!("label for point {k} out of range")));
            }
            p.set_label(k, v.clone());
        }
        Ok(p)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("poset file serializes")
    }

    pub fn from_json(s: &str) -> Result<Poset, PosetError> {
        let file: PosetFile =
            serde_json::from_str(s).map_err(|e| PosetError::Format(e.to_string()))?;
        Poset::from_file(&file)
    }

    /// SHA-256 of the order structure (labels excluded), hex encoded.
    pub fn structure_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.len() as u64).to_le_bytes());
        for (a, b) in self.cover_pairs() {
            h.update((a as u64).to_le_bytes());
            h.update((b as u64).to_le_bytes());
        }
        hex::encode(h.finalize())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn json_roundtrip(n in 1usize..14, density in 0.0f64..0.8, seed in any::<u64>()) {
            let mut p = crate::poset::random_poset(n, density, seed);
            p.set_label(0, "c0");
            let back = Poset::from_json(&p.to_json()).unwrap();
            prop_assert_eq!(&back, &p);
            prop_assert_eq!(back.structure_hash(), p.structure_hash());
        }
    }

    #[test]
    fn serializer_emits_transitive_reduction() {
        let p = Poset::chain(4);
        assert_eq!(p.to_file().cover, vec![[0, 1], [1, 2], [2, 3]]);
    }
}
