use std::collections::BTreeMap;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FilterOutcome {
    /// Selected ids, category by category in category order, best first.
    pub selected: Vec<String>,
    /// Categories that had nothing to select from.
    pub empty_categories: Vec<String>,
}

/// Number of items kept from a category of `n`: `ceil(fraction · n)`.
pub fn keep_count(n: usize, fraction: f64) -> usize {
    if n == 0 {
        return 0;
    }
    // tolerance absorbs products like 0.07 * 100 = 7.000000000000001
    ((fraction * n as f64 - 1e-9).ceil() as usize).clamp(1, n)
}

/// Keep the best-scoring `ceil(fraction · n)` sketches of every category.
/// Ties go to the lexicographically smaller id.
pub fn filter_top_percent(
    scored: &BTreeMap<String, Vec<(String, f64)>>,
    fraction: f64,
) -> Result<FilterOutcome> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::Config(format!("fraction {fraction} must be in (0, 1]")));
    }
    let mut out = FilterOutcome::default();
    for (category, items) in scored {
        if items.is_empty() {
            out.empty_categories.push(category.clone());
            continue;
        }
        if let Some((id, s)) = items.iter().find(|(_, s)| !s.is_finite()) {
            return Err(Error::Format(format!("score {s} for {id} is not finite")));
        }
        let mut ranked: Vec<&(String, f64)> = items.iter().collect();
        ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        out.selected.extend(
            ranked
                .into_iter()
                .take(keep_count(items.len(), fraction))
                .map(|(id, _)| id.clone()),
        );
    }
    Ok(out)
}
