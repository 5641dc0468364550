use std::cmp::Ordering;

use crate::error::{Error, Result};

/// Lower convex envelope of sampled points `(x_i, y_i)`, evaluated back at
/// every `x_i`. The `x_i` must be strictly increasing.
///
/// Uses a monotone-chain lower hull; collinear points are dropped from the
/// hull and re-evaluated by linear interpolation.
pub fn convex_envelope_1d(points: &[(f64, f64)]) -> Result<Vec<(f64, f64)>> {
    if points.len() < 2 {
        return Err(Error::InvalidGrid(format!(
            "need at least 2 points, got {}",
            points.len()
        )));
    }
    if let Some(w) = points
        .windows(2)
        .find(|w| w[1].0.partial_cmp(&w[0].0) != Some(Ordering::Greater))
    {
        return Err(Error::InvalidGrid(format!(
            "x must be strictly increasing ({} then {})",
            w[0].0, w[1].0
        )));
    }
    if points.iter().any(|p| !p.0.is_finite() || !p.1.is_finite()) {
        return Err(Error::InvalidGrid("non-finite sample".into()));
    }

    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(points.len());
    for &p in points {
        while hull.len() >= 2 {
            let o = hull[hull.len() - 2];
            let a = hull[hull.len() - 1];
            let cross = (a.0 - o.0) * (p.1 - o.1) - (a.1 - o.1) * (p.0 - o.0);
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }

    let mut out = Vec::with_capacity(points.len());
    let mut seg = 0;
    for &(x, y) in points {
        while seg + 1 < hull.len() - 1 && hull[seg + 1].0 < x {
            seg += 1;
        }
        let (x0, y0) = hull[seg];
        let (x1, y1) = hull[seg + 1];
        let env = if x == x0 {
            y0
        } else if x == x1 {
            y1
        } else {
            y0 + (y1 - y0) * (x - x0) / (x1 - x0)
        };
        // the envelope never exceeds the sample itself
        out.push((x, env.min(y)));
    }
    Ok(out)
}
