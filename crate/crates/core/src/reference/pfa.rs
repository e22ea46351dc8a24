use crate::error::{Error, Result};
use crate::geometry::{grating_tip_gap, GratingSpec};
use crate::lattice::{LatticeShape, X, Y};

use super::plates::plates_analytic_energy;

fn is_tooth_cell(g: &GratingSpec, cell: usize) -> bool {
    let p = g.period() as i64;
    ((cell as i64 - g.lateral_shift).rem_euclid(p)) < g.tooth_width as i64
}

/// Local vertical vacuum gap, in z-steps, over each x-cell `[c, c+1)`.
pub fn grating_surface_heights(
    bottom: &GratingSpec,
    top: &GratingSpec,
    shape: &LatticeShape,
) -> Result<Vec<i64>> {
    bottom.validate(shape)?;
    top.validate(shape)?;
    let tip_gap = grating_tip_gap(bottom, top, shape)?;
    if tip_gap < 1 {
        return Err(Error::Reference(format!(
            "gratings overlap: tip separation {tip_gap}"
        )));
    }
    Ok((0..shape.extent(X))
        .map(|c| {
            let mut d = tip_gap;
            if !is_tooth_cell(bottom, c) {
                d += bottom.tooth_height as i64;
            }
            if !is_tooth_cell(top, c) {
                d += top.tooth_height as i64;
            }
            d
        })
        .collect())
}

/// Proximity-force estimate: the plate formula applied column by column.
///
/// Each x-cell contributes a strip of area `N_y` (in `a^2`) at its local
/// gap; z distances are converted to `a` with the anisotropy `alpha`.
/// Returns the magnitude in `1/a`.
pub fn pfa_gratings(
    bottom: &GratingSpec,
    top: &GratingSpec,
    shape: &LatticeShape,
    alpha: f64,
) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(Error::Reference(format!("alpha must be positive, got {alpha}")));
    }
    let strip = shape.extent(Y) as f64;
    grating_surface_heights(bottom, top, shape)?
        .into_iter()
        .map(|d| plates_analytic_energy(strip, alpha * d as f64))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Orientation;
    use crate::reference::CASIMIR_PLATE_CONSTANT;

    fn pair(l: usize, h: usize, r: usize, s: i64) -> (GratingSpec, GratingSpec, LatticeShape) {
        let nz = 2 * h + r + 6;
        let shape = LatticeShape::new(4 * l, 6, nz, 2).unwrap();
        let bottom = GratingSpec {
            tooth_width: l,
            gap_width: l,
            tooth_height: h,
            base_z: 2,
            orientation: Orientation::Up,
            lateral_shift: 0,
        };
        let top = GratingSpec {
            base_z: 2 + 2 * h + r,
            orientation: Orientation::Down,
            lateral_shift: s,
            ..bottom
        };
        (bottom, top, shape)
    }

    #[test]
    fn flat_limit_is_the_plate_formula() {
        let (b, t, s) = pair(3, 0, 5, 1);
        let e = pfa_gratings(&b, &t, &s, 0.5).unwrap();
        let plates = plates_analytic_energy((12 * 6) as f64, 2.5).unwrap();
        assert!((e - plates).abs() < 1e-14 * plates);
    }

    #[test]
    fn aligned_teeth_closed_form() {
        let (l, h, r) = (7, 7, 8);
        let (b, t, s) = pair(l, h, r, 0);
        let e = pfa_gratings(&b, &t, &s, 1.0).unwrap();
        let area = (s.extent(X) * s.extent(Y)) as f64;
        let closed = CASIMIR_PLATE_CONSTANT * area / 2.0
            * (1.0 / (r as f64).powi(3) + 1.0 / ((r + 2 * h) as f64).powi(3));
        assert!((e - closed).abs() < 1e-12 * closed);
    }

    #[test]
    fn shift_sweep_is_a_saw() {
        let (l, h, r) = (5, 3, 4);
        let e: Vec<f64> = (0..2 * l as i64)
            .map(|s| {
                let (b, t, sh) = pair(l, h, r, s);
                pfa_gratings(&b, &t, &sh, 1.0).unwrap()
            })
            .collect();
        // Linear between aligned (s=0) and anti-aligned (s=L) extremes.
        for s in 1..l {
            let second = e[s + 1] - 2.0 * e[s] + e[s - 1];
            assert!(second.abs() < 1e-12 * e[0]);
        }
        assert!(e[0] > e[l]);
        assert!((e[1] - e[2 * l - 1]).abs() < 1e-12 * e[0]);
    }

    #[test]
    fn overlap_is_rejected() {
        let (b, mut t, s) = pair(3, 2, 1, 0);
        t.base_z -= 1;
        assert!(pfa_gratings(&b, &t, &s, 1.0).is_err());
    }
}
