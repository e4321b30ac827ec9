//! Band selection result type: k distinct band indices in spectral order.

use crate::error::{Error, Result};

/// An ordered set of distinct band indices, always sorted ascending so the
/// selected bands keep their spectral order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BandSelection(Vec<usize>);

impl BandSelection {
    /// Build from indices in any order; sorts and rejects duplicates or
    /// indices >= n_bands.
    pub fn new(mut indices: Vec<usize>, n_bands: usize) -> Result<Self> {
        indices.sort_unstable();
        for w in indices.windows(2) {
            if w[0] == w[1] {
                return Err(Error::InvalidParameter(format!(
                    "duplicate band index {} in selection",
                    w[0]
                )));
            }
        }
        if let Some(&last) = indices.last() {
            if last >= n_bands {
                return Err(Error::InvalidParameter(format!(
                    "band index {last} out of range for {n_bands} bands"
                )));
            }
        }
        Ok(BandSelection(indices))
    }

    /// The identity selection of all n bands.
    pub fn all(n_bands: usize) -> Self {
        BandSelection((0..n_bands).collect())
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, band: usize) -> bool {
        self.0.binary_search(&band).is_ok()
    }

    /// Project a full spectrum down to the selected bands.
    pub fn project(&self, spectrum: &[f64]) -> Vec<f64> {
        self.0.iter().map(|&i| spectrum[i]).collect()
    }

    /// Indices joined with the given separator, e.g. for CSV fields.
    pub fn joined(&self, sep: &str) -> String {
        self.0
            .iter()
            .map(|i| i.to_string())
            .collect::<Vec<_>>()
            .join(sep)
    }
}

impl std::fmt::Display for BandSelection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.joined(" "))
    }
}
