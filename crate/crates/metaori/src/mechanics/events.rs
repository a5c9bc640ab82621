use serde::{Deserialize, Serialize};

/// Values within this distance of zero carry no sign.
const NOISE_FLOOR: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExtremumKind {
    Maximum,
    Minimum,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Extremum {
    pub kind: ExtremumKind,
    /// Sample index; the middle of a flat run.
    pub index: usize,
    pub x: f64,
    pub y: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EventReport {
    pub extrema: Vec<Extremum>,
    /// The response changes sign at least twice, so a negative excursion
    /// separates two positive ones or the other way round.
    pub bistable: bool,
}

/// Strict interior local extrema of `ys` over `xs`, and the bistability
/// flag.
pub fn detect_events(xs: &[f64], ys: &[f64]) -> EventReport {
    assert_eq!(xs.len(), ys.len());
    let mut extrema = Vec::new();
    if ys.len() >= 3 {
        // Collapse runs of equal values, keeping first and last index.
        let mut runs: Vec<(usize, usize)> = Vec::new();
        for (i, &y) in ys.iter().enumerate() {
            match runs.last_mut() {
                Some(r) if ys[r.0] == y => r.1 = i,
                _ => runs.push((i, i)),
            }
        }
        for w in runs.windows(3) {
            let (prev, cur, next) = (ys[w[0].0], ys[w[1].0], ys[w[2].0]);
            let kind = if cur > prev && cur > next {
                ExtremumKind::Maximum
            } else if cur < prev && cur < next {
                ExtremumKind::Minimum
            } else {
                continue;
            };
            let index = (w[1].0 + w[1].1) / 2;
            extrema.push(Extremum { kind, index, x: xs[index], y: ys[index] });
        }
    }
    let mut signs = ys.iter().filter(|y| y.abs() > NOISE_FLOOR).map(|y| y.signum()).collect::<Vec<_>>();
    signs.dedup();
    EventReport { extrema, bistable: signs.len() >= 3 }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monotone_has_no_events() {
        let xs: Vec<f64> = (0..50).map(|k| k as f64 * 0.1).collect();
        let ys: Vec<f64> = xs.iter().map(|x| x - 2.0).collect();
        let r = detect_events(&xs, &ys);
        assert!(r.extrema.is_empty());
        assert!(!r.bistable);
    }

    #[test]
    fn plateau_counts_once() {
        let r = detect_events(&[0.0, 1.0, 2.0, 3.0, 4.0], &[0.0, 1.0, 1.0, 1.0, 0.0]);
        assert_eq!(r.extrema.len(), 1);
        assert_eq!(r.extrema[0].index, 2);
    }

    #[test]
    fn noise_does_not_make_bistable() {
        let r = detect_events(&[0.0, 1.0, 2.0, 3.0], &[1.0, -1e-9, 1.0, 2.0]);
        assert!(!r.bistable);
    }
}
