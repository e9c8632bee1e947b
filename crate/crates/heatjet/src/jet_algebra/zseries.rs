//! Formal truncated series in a single bookkeeping variable `z`.

/// Coefficient list of a formal power series in `z`, truncated at order
/// `len - 1`. Entry `r` is the exact coefficient of `z^r`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ZSeries<T> {
    entries: Vec<T>,
}

impl<T> ZSeries<T> {
    pub fn new(entries: Vec<T>) -> Self {
        assert!(!entries.is_empty(), "a series needs at least the z^0 entry");
        ZSeries { entries }
    }

    /// Truncation order R; entries run z^0 ..= z^R.
    pub fn order(&self) -> usize {
        self.entries.len() - 1
    }

    pub fn get(&self, r: usize) -> &T {
        &self.entries[r]
    }

    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.entries.iter()
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> ZSeries<U> {
        ZSeries {
            entries: self.entries.iter().map(f).collect(),
        }
    }
}
