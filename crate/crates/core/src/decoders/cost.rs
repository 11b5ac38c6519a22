use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{decode_gao, decode_gs};
use crate::gf2e::{lagrange_interpolate, Field, FieldElement};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CostSource {
    /// Factors supplied by the caller (or the 1.0 default).
    Fixed,
    /// Factors measured by [`CostModel::calibrate`].
    Calibrated,
}

/// Cost of one Gao or GS attempt in units of one k-point Lagrange
/// interpolation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostModel {
    pub gao_units: f64,
    pub gs_units: f64,
    pub source: CostSource,
}

impl Default for CostModel {
    fn default() -> Self {
        CostModel::fixed(1.0, 1.0)
    }
}

impl CostModel {
    pub fn fixed(gao_units: f64, gs_units: f64) -> Self {
        CostModel {
            gao_units,
            gs_units,
            source: CostSource::Fixed,
        }
    }

    pub fn is_calibrated(&self) -> bool {
        self.source == CostSource::Calibrated
    }

    /// Times Lagrange, Gao and GS (multiplicity `s`) on random u-point inputs
    /// over `field` and returns the median ratios over `rounds` repetitions.
    pub fn calibrate<R: Rng + ?Sized>(
        field: &Field,
        u: usize,
        k: usize,
        s: u32,
        rounds: usize,
        rng: &mut R,
    ) -> Self {
        assert!(k >= 1 && u >= k && u <= field.order());
        let mut xs: Vec<FieldElement> = field.elements().collect();
        let mut gao = Vec::new();
        let mut gs = Vec::new();
        for _ in 0..rounds.max(1) {
            // Random points: a non-mated attempt, the common case.
            for i in 0..u {
                let j = rng.random_range(i..xs.len());
                xs.swap(i, j);
            }
            let pts: Vec<_> = xs[..u].iter().map(|&x| (x, field.random(rng))).collect();
            let lg_reps = 8;
            let t0 = Instant::now();
            for _ in 0..lg_reps {
                std::hint::black_box(lagrange_interpolate(field, &pts[..k]).ok());
            }
            let lg = t0.elapsed().as_secs_f64() / lg_reps as f64;
            let t1 = Instant::now();
            std::hint::black_box(decode_gao(field, &pts, k).ok());
            let g = t1.elapsed().as_secs_f64();
            let t2 = Instant::now();
            std::hint::black_box(decode_gs(field, &pts, k, s).ok());
            let h = t2.elapsed().as_secs_f64();
            if lg > 0.0 {
                gao.push(g / lg);
                gs.push(h / lg);
            }
        }
        CostModel {
            gao_units: median(&mut gao).unwrap_or(1.0),
            gs_units: median(&mut gs).unwrap_or(1.0),
            source: CostSource::Calibrated,
        }
    }
}

fn median(v: &mut [f64]) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(|a, b| a.total_cmp(b));
    Some(v[v.len() / 2])
}
