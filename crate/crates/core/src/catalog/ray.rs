use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::catalog::domain::DomainSpec;
use crate::error::{Error, Result};
use crate::point::Point;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RaySchedule {
    pub count: usize,
    pub delta_min: f64,
}

/// Exit parameter `t*` of `t ↦ t·u` from the domain, by bisection.
fn exit_time(spec: &DomainSpec, u: &[Complex<f64>]) -> Result<f64> {
    let at = |t: f64| Point::new(u.iter().map(|c| c * t).collect()).map(|p| spec.contains(&p));
    let mut hi = 1.0;
    while at(hi)? {
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::InvalidDirection("ray never leaves the domain".into()));
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if at(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Points on the ray from the origin along `direction`, at distances to the
/// boundary (measured along the ray) spaced geometrically from
/// `min(0.5, t*/2)` down to `delta_min`, ordered toward the boundary.
pub fn boundary_ray(spec: &DomainSpec, direction: &[Complex<f64>], schedule: RaySchedule) -> Result<Vec<Point<f64>>> {
    spec.validate()?;
    if direction.len() != spec.dim() {
        return Err(Error::InvalidDirection(format!(
            "direction has {} components, domain has dimension {}",
            direction.len(),
            spec.dim()
        )));
    }
    let norm = direction.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(Error::InvalidDirection(
            "direction must be a non-zero finite vector".into(),
        ));
    }
    if !(schedule.delta_min > 0.0) || schedule.count == 0 {
        return Err(Error::InvalidParams(
            "schedule needs count >= 1 and delta_min > 0".into(),
        ));
    }
    let u: Vec<Complex<f64>> = direction.iter().map(|c| c / norm).collect();
    let t_star = exit_time(spec, &u)?;
    let d_max = (0.5f64).min(t_star / 2.0);
    if schedule.delta_min >= t_star || (schedule.count > 1 && schedule.delta_min > d_max) {
        return Err(Error::InvalidParams(format!(
            "delta_min {} exceeds the largest distance {d_max}",
            schedule.delta_min
        )));
    }
    let distances: Vec<f64> = if schedule.count == 1 {
        vec![schedule.delta_min]
    } else {
        let ratio = (schedule.delta_min / d_max).powf(1.0 / (schedule.count - 1) as f64);
        (0..schedule.count)
            .map(|k| {
                if k + 1 == schedule.count {
                    schedule.delta_min
                } else {
                    d_max * ratio.powi(k as i32)
                }
            })
            .collect()
    };
    distances
        .into_iter()
        .map(|d| {
            let p = Point::new(u.iter().map(|c| c * (t_star - d)).collect())?;
            if spec.contains(&p) {
                Ok(p)
            } else {
                Err(Error::DomainViolation(format!(
                    "ray point at distance {d} not interior"
                )))
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_schedule() {
        let pts = boundary_ray(
            &DomainSpec::BallHyperbolic { n: 1 },
            &[Complex::new(1.0, 0.0)],
            RaySchedule {
                count: 4,
                delta_min: 1e-3,
            },
        )
        .unwrap();
        let z: Vec<f64> = pts.iter().map(|p| p.coord(0).re).collect();
        assert!((z[0] - 0.5).abs() < 1e-12);
        assert!((z[1] - (1.0 - 0.5 * 0.002f64.powf(1.0 / 3.0))).abs() < 1e-12);
        assert!((z[2] - 0.99).abs() < 0.005);
        assert!((z[3] - 0.999).abs() < 1e-12);
    }

    #[test]
    fn thullen_points_interior() {
        let spec = DomainSpec::thullen_gm(2);
        let pts = boundary_ray(
            &spec,
            &[Complex::new(0.0, 0.0), Complex::new(1.0, 0.0)],
            RaySchedule {
                count: 6,
                delta_min: 1e-4,
            },
        )
        .unwrap();
        for p in &pts {
            let (z, w) = (p.coord(0).norm_sqr(), p.coord(1).norm_sqr());
            assert!(z + w * w < 1.0);
        }
    }

    #[test]
    fn zero_direction() {
        let e = boundary_ray(
            &DomainSpec::BallHyperbolic { n: 2 },
            &[Complex::new(0.0, 0.0); 2],
            RaySchedule {
                count: 3,
                delta_min: 1e-3,
            },
        )
        .unwrap_err();
        assert_eq!(e.name(), "InvalidDirection");
    }
}
