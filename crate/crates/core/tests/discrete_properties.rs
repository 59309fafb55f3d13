use std::collections::HashMap;

use cascade_rd::discrete::*;
use cascade_rd::geometry::{LowerEnvelope, RateVector};
use cascade_rd::prob::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rows(rng: &mut ChaCha8Rng, r: usize, c: usize) -> Stochastic {
    let mut probs = Vec::with_capacity(r * c);
    for _ in 0..r {
        let w: Vec<f64> = (0..c).map(|_| if rng.gen_bool(0.2) { 0.0 } else { rng.gen::<f64>() } + 1e-3).collect();
        let t: f64 = w.iter().sum();
        probs.extend(w.iter().map(|v| v / t));
    }
    Stochastic::from_flat(r, c, probs).unwrap()
}

fn source(rng: &mut ChaCha8Rng, nx: usize, ny: usize) -> JointPmf {
    let w: Vec<f64> = (0..nx * ny).map(|_| rng.gen_range(0.02..1.0)).collect();
    JointPmf::from_weights(["x", "y"], vec![nx, ny], w).unwrap()
}

fn random_distortion(rng: &mut ChaCha8Rng, r: usize, c: usize) -> DistortionMatrix {
    DistortionMatrix::new((0..r).map(|_| (0..c).map(|_| rng.gen_range(0.0..2.0)).collect()).collect()).unwrap()
}

/// Outcomes with probabilities, evaluated without the library's joint type.
struct Table(Vec<(Vec<usize>, f64)>);

impl Table {
    fn h(&self, vars: &[usize]) -> f64 {
        let mut m: HashMap<Vec<usize>, f64> = HashMap::new();
        for (o, p) in &self.0 {
            *m.entry(vars.iter().map(|&v| o[v]).collect()).or_default() += p;
        }
        -m.values().filter(|&&p| p > 0.0).map(|p| p * p.log2()).sum::<f64>()
    }

    fn cmi(&self, a: &[usize], b: &[usize], c: &[usize]) -> f64 {
        let cat = |s: &[&[usize]]| s.concat();
        self.h(&cat(&[a, c])) + self.h(&cat(&[b, c])) - self.h(&cat(&[a, b, c])) - self.h(c)
    }

    fn expect(&self, x: usize, r: usize, d: &DistortionMatrix) -> f64 {
        self.0.iter().map(|(o, p)| p * d.get(o[x], o[r])).sum()
    }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn cascade_matches_direct_evaluation(seed in any::<u64>(), nx in 2usize..4, ny in 1usize..3, n1 in 1usize..4, n2 in 1usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = source(&mut rng, nx, ny);
        let ch = CascadeChannel::new(nx, ny, n1, n2, rows(&mut rng, nx * ny, n1 * n2)).unwrap();
        let (d1, d2) = (random_distortion(&mut rng, nx, n1), random_distortion(&mut rng, nx, n2));
        let mut t = Vec::new();
        for x in 0..nx { for y in 0..ny { for a in 0..n1 { for b in 0..n2 {
            t.push((vec![x, y, a, b], p.probs()[x * ny + y] * ch.prob(x, y, a, b)));
        }}}}
        let t = Table(t);
        let got = cascade_rates(&p, &ch, &d1, &d2).unwrap();
        prop_assert!(close(got.rates[0], t.cmi(&[0], &[2, 3], &[1]).max(0.0), 1e-12));
        prop_assert!(close(got.rates[1], t.cmi(&[0, 1], &[3], &[]).max(0.0), 1e-12));
        prop_assert!(close(got.distortions[0], t.expect(0, 2, &d1), 1e-12));
        prop_assert!(close(got.distortions[1], t.expect(0, 3, &d2), 1e-12));
        let c = coordination_rates(&p, &ch).unwrap();
        prop_assert_eq!(c.rates, got.rates);
    }

    #[test]
    fn triangular_matches_direct_evaluation(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (nx, ny, n1, nu, n2) = (2, 2, 2, 2, 2);
        let p = source(&mut rng, nx, ny);
        let ch = TriangularChannel::new(nx, ny, n1, nu, n2, rows(&mut rng, 4, 4), rows(&mut rng, 4, 2)).unwrap();
        let h = DistortionMatrix::hamming(2);
        let mut t = Vec::new();
        for x in 0..nx { for y in 0..ny { for u in 0..nu { for a in 0..n1 { for b in 0..n2 {
            let pr = p.probs()[x * ny + y] * ch.first_stage().get(x * ny + y, a * nu + u)
                * ch.second_stage().get(x * nu + u, b);
            t.push((vec![x, y, u, a, b], pr));
        }}}}}
        let t = Table(t);
        let got = triangular_rates(&p, &ch, &h, &h).unwrap();
        prop_assert!(close(got.rates[0], t.cmi(&[0], &[3, 2], &[1]).max(0.0), 1e-12));
        prop_assert!(close(got.rates[1], t.cmi(&[0, 1], &[2], &[]).max(0.0), 1e-12));
        prop_assert!(close(got.rates[2], t.cmi(&[0], &[4], &[2]).max(0.0), 1e-12));
        prop_assert!(close(got.distortions[1], t.expect(0, 4, &h), 1e-12));

        // the same channel as a one-plus-one multiuser channel
        let mut cond = Vec::new();
        for x in 0..nx { for y in 0..ny { for a in 0..n1 { for b in 0..n2 { for u in 0..nu {
            cond.push(ch.first_stage().get(x * ny + y, a * nu + u) * ch.second_stage().get(x * nu + u, b));
        }}}}}
        let mu = MultiuserChannel::new(nx, ny, vec![n1, n2], nu, Stochastic::from_flat(4, 8, cond).unwrap()).unwrap();
        let m = multiuser_rates(&p, &mu, 1, 1, &[h.clone(), h.clone()]).unwrap();
        for (a, b) in m.rates.iter().zip(&got.rates) {
            prop_assert!(close(*a, *b, 1e-12));
        }
    }

    #[test]
    fn multiuser_two_plus_one_matches_direct_evaluation(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = source(&mut rng, 2, 2);
        let ch = MultiuserChannel::new(2, 2, vec![2, 2, 2], 2, rows(&mut rng, 4, 16)).unwrap();
        let h = DistortionMatrix::hamming(2);
        let mut t = Vec::new();
        for x in 0..2 { for y in 0..2 { for col in 0..16 {
            let o = vec![x, y, col / 8, (col / 4) % 2, (col / 2) % 2, col % 2];
            t.push((o, p.probs()[x * 2 + y] * ch.cond.get(x * 2 + y, col)));
        }}}
        let t = Table(t);
        let got = multiuser_rates(&p, &ch, 2, 1, &[h.clone(), h.clone(), h.clone()]).unwrap();
        let want = [
            t.cmi(&[0], &[2, 3, 5], &[1]),
            t.cmi(&[0], &[3, 5], &[1]),
            t.cmi(&[0, 1], &[5], &[]),
            t.cmi(&[0], &[4], &[5]),
        ];
        for (g, w) in got.rates.iter().zip(want) {
            prop_assert!(close(*g, w.max(0.0), 1e-12));
        }
        for (i, d) in got.distortions.iter().enumerate() {
            prop_assert!(close(*d, t.expect(0, 2 + i, &h), 1e-12));
        }
    }

    #[test]
    fn weighted_sum_is_convex_along_segments(seed in any::<u64>(), lambda in 0.0f64..5.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = source(&mut rng, 2, 3);
        let a = CascadeChannel::new(2, 3, 2, 3, rows(&mut rng, 6, 6)).unwrap();
        let b = CascadeChannel::new(2, 3, 2, 3, rows(&mut rng, 6, 6)).unwrap();
        let (d1, d2) = (DistortionMatrix::hamming(2), random_distortion(&mut rng, 2, 3));
        let obj = |c: &CascadeChannel| {
            let r = cascade_rates(&p, c, &d1, &d2).unwrap();
            r.rates[0] + lambda * r.rates[1]
        };
        let mid = a.mix(&b, 0.5).unwrap();
        prop_assert!(obj(&mid) <= 0.5 * (obj(&a) + obj(&b)) + 1e-10);
    }

    #[test]
    fn factorization_preserves_triangular_rates(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shape = vec![2, 2, 3, 2, 2];
        let w: Vec<f64> = (0..48).map(|_| if rng.gen_bool(0.15) { 0.0 } else { rng.gen() }).collect();
        let full = JointPmf::from_weights(["x", "y", "u", "x1", "x2"], shape, w).unwrap();
        let d1 = random_distortion(&mut rng, 2, 2);
        let d2 = random_distortion(&mut rng, 2, 2);
        let direct = triangular_rates_of_joint(&full, &d1, &d2).unwrap();
        let (pxy, ch) = TriangularChannel::from_joint(&full).unwrap();
        let factored = triangular_rates(&pxy, &ch, &d1, &d2).unwrap();
        for (a, b) in direct.rates.iter().chain(&direct.distortions).zip(factored.rates.iter().chain(&factored.distortions)) {
            prop_assert!(close(*a, *b, 1e-12), "{:?} vs {:?}", direct, factored);
        }
    }
}

fn binary_instance(rng: &mut ChaCha8Rng) -> (JointPmf, f64, f64) {
    let p = source(rng, 2, 2);
    (p, rng.gen_range(0.05..0.35), rng.gen_range(0.05..0.35))
}

#[test]
fn optimizer_points_are_achievable() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let h = DistortionMatrix::hamming(2);
    for _ in 0..4 {
        let (p, a, b) = binary_instance(&mut rng);
        for o in trace_boundary(&p, &h, &h, a, b, &[0.0, 1.0, 1e4], &OptimizerOptions::default()).unwrap() {
            let again = cascade_rates(&p, &o.channel, &h, &h).unwrap();
            assert_eq!(again, o.point);
            assert!(o.point.distortions[0] <= a + 1e-9 && o.point.distortions[1] <= b + 1e-9, "{o:?}");
        }
    }
}

#[test]
fn lattice_points_never_beat_the_optimizer() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let h = DistortionMatrix::hamming(2);
    for _ in 0..3 {
        let (p, a, b) = binary_instance(&mut rng);
        let grid = brute_force_boundary(&p, &h, &h, a, b, 0.1).unwrap();
        let opt = trace_boundary(&p, &h, &h, a, b, &DEFAULT_LAMBDAS, &OptimizerOptions::default()).unwrap();
        for o in &opt {
            for g in &grid {
                let better = g.rates.iter().zip(&o.point.rates).all(|(x, y)| *x < y - 5e-3);
                assert!(!better, "{g:?} beats {:?}", o.point);
            }
        }
    }
}

#[test]
fn dsbs_grid_frontier_sits_above_optimizer_curve() {
    let p = JointPmf::new(["x", "y"], vec![2, 2], vec![0.45, 0.05, 0.05, 0.45]).unwrap();
    let h = DistortionMatrix::hamming(2);
    let grid = brute_force_boundary(&p, &h, &h, 0.1, 0.1, 0.05).unwrap();
    let opt = trace_boundary(&p, &h, &h, 0.1, 0.1, &DEFAULT_LAMBDAS, &OptimizerOptions::default()).unwrap();
    assert!(!grid.is_empty());
    let curve: Vec<RateVector> = opt.iter().map(|o| o.point.rate_vector()).collect();
    let env = LowerEnvelope::new(&curve).unwrap();
    // time sharing between optimizer points matches or beats every grid point
    for g in &grid {
        let r1 = env.r1_at(g.rates[1] + 5e-3).expect("optimizer covers the grid range");
        assert!(r1 <= g.rates[0] + 5e-3, "{g:?} vs {r1}");
    }
}

#[test]
fn grid_lossless_corner() {
    let p = JointPmf::new(["x", "y"], vec![2, 2], vec![0.45, 0.05, 0.05, 0.45]).unwrap();
    let h = DistortionMatrix::hamming(2);
    let f = brute_force_boundary(&p, &h, &h, 0.0, 0.0, 0.05).unwrap();
    assert!(f.iter().any(|q| close(q.rates[0], binary_entropy(0.1), 1e-9) && close(q.rates[1], 1.0, 1e-9)));
}

#[test]
fn auxiliary_size_nesting_and_cascade_slice() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let h = DistortionMatrix::hamming(2);
    for _ in 0..2 {
        let (p, a, b) = binary_instance(&mut rng);
        let one = triangular_inner_search(&p, &h, &h, a, b, 1, 0.1).unwrap();
        let two = triangular_inner_search(&p, &h, &h, a, b, 2, 0.1).unwrap();
        assert!(one.iter().all(|q| q.rates[1] == 0.0));
        for q in &one {
            assert!(
                two.iter().any(|t| t.rates.iter().zip(&q.rates).all(|(x, y)| *x <= y + 1e-9)),
                "{q:?} lost when |U| grows"
            );
        }
        let cascade = brute_force_boundary(&p, &h, &h, a, b, 0.1).unwrap();
        for t in two.iter().filter(|t| t.rates[2] <= 1e-9) {
            assert!(
                cascade.iter().any(|c| c.rates[0] <= t.rates[0] + 2e-2 && c.rates[1] <= t.rates[1] + 2e-2),
                "{t:?} not covered by the cascade lattice"
            );
        }
    }
}

#[test]
fn triangular_search_points_are_consistent() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    let h = DistortionMatrix::hamming(2);
    let (p, a, b) = binary_instance(&mut rng);
    let pts = triangular_inner_search(&p, &h, &h, a, b, 3, 0.2).unwrap();
    assert!(!pts.is_empty());
    for q in &pts {
        assert_eq!(q.rates.len(), 3);
        assert!(q.distortions[0] <= a + 1e-9 && q.distortions[1] <= b + 1e-9);
    }
}
