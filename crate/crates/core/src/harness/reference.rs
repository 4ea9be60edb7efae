use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    Exact,
    Lower,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ReferenceEntry {
    pub k: usize,
    pub w: u64,
    pub kind: BoundKind,
    pub source: &'static str,
}

/// Known values and lower bounds for `w(3, k)`.
pub struct ReferenceTable;

const ENTRIES: [ReferenceEntry; 3] = [
    ReferenceEntry { k: 10, w: 97, kind: BoundKind::Exact, source: "Brown, Landman and Robertson" },
    ReferenceEntry { k: 20, w: 389, kind: BoundKind::Lower, source: "Ahmed, Kullmann and Snevily" },
    ReferenceEntry { k: 30, w: 903, kind: BoundKind::Lower, source: "Ahmed, Kullmann and Snevily" },
];

impl ReferenceTable {
    pub fn entries() -> &'static [ReferenceEntry] {
        &ENTRIES
    }

    pub fn get(k: usize) -> Option<ReferenceEntry> {
        ENTRIES.iter().copied().find(|e| e.k == k)
    }
}
