use fracmeas_core::geom::{
    parity_count, Disk, FlatDiskK, ManifoldShape, PointSet, SimplicialK, SphereK,
};
use fracmeas_core::mc::{sample_orthonormal_frame, sample_w};
use fracmeas_core::xalg::Blade;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn point(rng: &mut ChaCha8Rng, n: usize, half: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-half..half)).collect()
}

fn random_shape(rng: &mut ChaCha8Rng, n: usize) -> ManifoldShape {
    match rng.random_range(0..4) {
        0 => {
            let pts = (0..rng.random_range(1..5)).map(|_| point(rng, n, 1.5)).collect();
            ManifoldShape::PointSet(PointSet::new(n, pts).unwrap())
        }
        1 => {
            let k = rng.random_range(1..n);
            let basis = sample_orthonormal_frame(rng, n, k + 1);
            let radius = rng.random_range(0.3..1.5);
            ManifoldShape::Sphere(SphereK::new(n, k, point(rng, n, 0.5), radius, basis).unwrap())
        }
        2 => {
            let k = rng.random_range(1..n);
            let basis = sample_orthonormal_frame(rng, n, k);
            let radius = rng.random_range(0.3..1.5);
            ManifoldShape::FlatDisk(FlatDiskK::new(n, k, point(rng, n, 0.5), radius, basis).unwrap())
        }
        _ => {
            let k = rng.random_range(1..n);
            let vertices: Vec<Vec<f64>> = (0..k + 3).map(|_| point(rng, n, 1.5)).collect();
            let simplices = vec![(0..=k).collect(), (2..k + 3).collect()];
            ManifoldShape::Simplicial(SimplicialK::new(n, k, vertices, simplices).unwrap())
        }
    }
}

fn random_disk(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Disk {
    let (_, omega) = sample_w(n, k, rng).unwrap();
    Disk::new(point(rng, n, 2.0), omega, rng.random_range(0.1..4.0)).unwrap()
}

/// `x -> q x + t` with `q` orthogonal (rows given).
struct Motion {
    q: Vec<Vec<f64>>,
    t: Vec<f64>,
}

impl Motion {
    fn rotate(&self, x: &[f64]) -> Vec<f64> {
        self.q.iter().map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }

    fn point(&self, x: &[f64]) -> Vec<f64> {
        self.rotate(x).iter().zip(&self.t).map(|(a, b)| a + b).collect()
    }

    fn frame(&self, f: &[Vec<f64>]) -> Vec<Vec<f64>> {
        f.iter().map(|v| self.rotate(v)).collect()
    }

    fn shape(&self, s: &ManifoldShape) -> ManifoldShape {
        let n = s.dim();
        match s {
            ManifoldShape::PointSet(p) => {
                ManifoldShape::PointSet(PointSet::new(n, p.points().iter().map(|x| self.point(x)).collect()).unwrap())
            }
            ManifoldShape::Sphere(p) => ManifoldShape::Sphere(
                SphereK::new(n, s.grade(), self.point(p.center()), p.radius(), self.frame(p.basis())).unwrap(),
            ),
            ManifoldShape::FlatDisk(p) => ManifoldShape::FlatDisk(
                FlatDiskK::new(n, s.grade(), self.point(p.center()), p.radius(), self.frame(p.basis())).unwrap(),
            ),
            ManifoldShape::Simplicial(p) => ManifoldShape::Simplicial(
                SimplicialK::new(
                    n,
                    s.grade(),
                    p.vertices().iter().map(|x| self.point(x)).collect(),
                    p.simplices().to_vec(),
                )
                .unwrap(),
            ),
        }
    }

    fn disk(&self, d: &Disk) -> Disk {
        let n = d.dim();
        let normal = if d.grade() == 0 {
            d.normal().clone()
        } else {
            Blade::from_orthonormal(n, self.frame(d.normal().frame())).unwrap()
        };
        Disk::new(self.point(d.center()), normal, d.radius()).unwrap()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn parity_is_invariant_under_rigid_motions(seed in any::<u64>(), n in 2usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shape = random_shape(&mut rng, n);
        let disk = random_disk(&mut rng, n, shape.grade());
        let motion = Motion { q: sample_orthonormal_frame(&mut rng, n, n), t: point(&mut rng, n, 5.0) };
        let before = parity_count(&shape, &disk).unwrap();
        let after = parity_count(&motion.shape(&shape), &motion.disk(&disk)).unwrap();
        prop_assume!(!before.is_degenerate() && !after.is_degenerate());
        prop_assert_eq!(before.count, after.count);
        prop_assert_eq!(before.parity, after.parity);
    }

    #[test]
    fn convex_disks_are_hit_at_most_once(seed in any::<u64>(), n in 2usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = rng.random_range(1..n);
        let basis = sample_orthonormal_frame(&mut rng, n, k);
        let shape = ManifoldShape::FlatDisk(FlatDiskK::new(n, k, point(&mut rng, n, 1.0), rng.random_range(0.1..2.0), basis).unwrap());
        let disk = random_disk(&mut rng, n, k);
        let res = parity_count(&shape, &disk).unwrap();
        prop_assert!(res.count <= 1);
    }

    #[test]
    fn circle_parity_matches_an_angular_scan(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let basis = sample_orthonormal_frame(&mut rng, 3, 2);
        let center = point(&mut rng, 3, 0.5);
        let rho = rng.random_range(0.3..1.5);
        let shape = ManifoldShape::Sphere(SphereK::new(3, 1, center.clone(), rho, basis.clone()).unwrap());
        let disk = random_disk(&mut rng, 3, 1);
        let res = parity_count(&shape, &disk).unwrap();
        prop_assume!(!res.is_degenerate());
        match scan_circle(&center, rho, &basis, &disk) {
            Some(count) => prop_assert_eq!(res.count, count),
            None => prop_assume!(false),
        }
    }
}

/// Counts crossings of the disk plane along a fine angular grid, refining
/// each by bisection. `None` when the configuration is too close to a
/// tangency or to the disk rim for the grid to decide.
fn scan_circle(c: &[f64], rho: f64, basis: &[Vec<f64>], disk: &Disk) -> Option<usize> {
    const STEPS: usize = 4000;
    let nu = &disk.normal().frame()[0];
    let at = |theta: f64| -> Vec<f64> {
        (0..3).map(|i| c[i] + rho * (theta.cos() * basis[0][i] + theta.sin() * basis[1][i])).collect()
    };
    let height = |theta: f64| -> f64 {
        at(theta).iter().zip(disk.center()).zip(nu).map(|((x, p), u)| (x - p) * u).sum()
    };
    let step = std::f64::consts::TAU / STEPS as f64;
    let mut count = 0;
    for i in 0..STEPS {
        let (mut lo, mut hi) = (i as f64 * step, (i + 1) as f64 * step);
        let (hl, hh) = (height(lo), height(hi));
        if hl.abs() < 1e-3 * step * rho && hh.abs() < 1e-3 * step * rho {
            return None;
        }
        if (hl > 0.0) == (hh > 0.0) {
            // a double crossing inside one cell needs a near-tangent plane
            let mid = height((lo + hi) / 2.0);
            if (mid > 0.0) != (hl > 0.0) || mid.abs() < 1e-6 {
                return None;
            }
            continue;
        }
        for _ in 0..60 {
            let m = (lo + hi) / 2.0;
            if (height(m) > 0.0) == (hl > 0.0) {
                lo = m;
            } else {
                hi = m;
            }
        }
        let z = at(lo);
        let dist = z.iter().zip(disk.center()).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        if (dist - disk.radius()).abs() < 1e-6 {
            return None;
        }
        if dist < disk.radius() {
            count += 1;
        }
    }
    Some(count)
}
