use super::{dist, Point};
use crate::error::{Error, Result};
use rayon::prelude::*;

fn directed(e: &[Point], f: &[Point]) -> f64 {
    e.par_iter()
        .map(|&p| f.iter().map(|&q| dist(p, q)).fold(f64::INFINITY, f64::min))
        .reduce(|| 0.0, f64::max)
}

/// Hausdorff distance between two finite point sets (brute force).
pub fn hausdorff_distance(e: &[Point], f: &[Point]) -> Result<f64> {
    if e.is_empty() || f.is_empty() {
        return Err(Error::Argument("Hausdorff distance of an empty set".into()));
    }
    Ok(directed(e, f).max(directed(f, e)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_cases() {
        let e = vec![[0.0, 0.0], [1.0, 2.0]];
        assert_eq!(hausdorff_distance(&e, &e).unwrap(), 0.0);
        assert_eq!(hausdorff_distance(&[[0.0, 0.0]], &[[3.0, 0.0]]).unwrap(), 3.0);
        assert!(hausdorff_distance(&[], &e).is_err());
    }

    #[test]
    fn shifted_segment() {
        let seg: Vec<Point> = (0..=100).map(|i| [i as f64 / 100.0, 0.0]).collect();
        let v = [0.0, 0.3];
        let shifted: Vec<Point> = seg.iter().map(|p| [p[0] + v[0], p[1] + v[1]]).collect();
        assert!((hausdorff_distance(&seg, &shifted).unwrap() - 0.3).abs() < 1e-12);
    }
}
