use thermofuse::diffusion::*;
use thermofuse::seeded_rng;

fn default_schedule() -> NoiseSchedule {
    NoiseSchedule::linear(1000, 1e-4, 0.02).unwrap()
}

fn mean_var(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    (m, v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / n)
}

#[test]
fn forward_marginal_moments() {
    let s = default_schedule();
    let mut rng = seeded_rng(5);
    let (mu, sd) = (0.4, 0.7);
    let n = 100_000;
    for t in [1, 100, 500, 1000] {
        let x0 = Tensor2D::randn((1, n), &mut rng).map(|z| mu + sd * z);
        let eps = Tensor2D::randn((1, n), &mut rng);
        let xt = q_sample(&x0, t, &eps, &s).unwrap();
        let ab = s.alpha_bar(t);
        let (m, v) = mean_var(xt.data());
        let want_v = ab * sd * sd + 1.0 - ab;
        assert!(
            (v - want_v).abs() / want_v < 0.02,
            "t={t}: var {v} vs {want_v}"
        );
        assert!((m - ab.sqrt() * mu).abs() < 0.02, "t={t}: mean {m}");
    }
}

/// `E[eps | x_t]` by Simpson quadrature over `x_0`.
fn posterior_noise_quadrature(xt: f64, ab: f64, mu: f64, sd: f64) -> f64 {
    let steps = 20_000;
    let (lo, hi) = (mu - 12.0 * sd, mu + 12.0 * sd);
    let h = (hi - lo) / steps as f64;
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..=steps {
        let x0 = lo + i as f64 * h;
        let w = if i == 0 || i == steps {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let prior = (-(x0 - mu).powi(2) / (2.0 * sd * sd)).exp();
        let eps = (xt - ab.sqrt() * x0) / (1.0 - ab).sqrt();
        let like = (-eps * eps / 2.0).exp();
        num += w * prior * like * eps;
        den += w * prior * like;
    }
    num / den
}

#[test]
fn optimal_denoiser_matches_quadrature() {
    let s = default_schedule();
    let target = GaussianTarget {
        mean: -0.3,
        std: 0.6,
    };
    let d = GaussianOptimalDenoiser::unconditional(s.clone(), target).unwrap();
    for t in [5, 50, 300, 999] {
        for xt in [-2.0, -0.1, 0.0, 0.8, 2.5] {
            let got = d.posterior_noise(xt, t, Condition::Normal);
            let want = posterior_noise_quadrature(xt, s.alpha_bar(t), target.mean, target.std);
            assert!((got - want).abs() < 1e-8, "t={t} x={xt}: {got} vs {want}");
        }
    }
}

#[test]
fn reverse_mean_with_true_noise_is_posterior_mean() {
    let s = default_schedule();
    let mut rng = seeded_rng(1);
    let x0 = Tensor2D::randn((3, 4), &mut rng);
    let eps = Tensor2D::randn((3, 4), &mut rng);
    for t in [2, 10, 700, 1000] {
        let xt = q_sample(&x0, t, &eps, &s).unwrap();
        let mu = reverse_mean(&xt, t, &eps, &s).unwrap();
        let (ab, ab_prev, beta) = (s.alpha_bar(t), s.alpha_bar(t - 1), s.beta(t));
        for i in 0..12 {
            let want = ab_prev.sqrt() * beta / (1.0 - ab) * x0.data()[i]
                + (1.0 - beta).sqrt() * (1.0 - ab_prev) / (1.0 - ab) * xt.data()[i];
            assert!((mu.data()[i] - want).abs() < 1e-10, "t={t}");
        }
    }
}

#[test]
fn sampling_recovers_gaussian_target() {
    let s = default_schedule();
    let normal = GaussianTarget {
        mean: 0.5,
        std: 0.8,
    };
    let malignant = GaussianTarget {
        mean: -1.2,
        std: 0.4,
    };
    let d = GaussianOptimalDenoiser::new(s.clone(), normal, malignant).unwrap();
    for (cond, target) in [
        (Condition::Normal, normal),
        (Condition::Malignant, malignant),
    ] {
        let chains = sample_chains(&d, (1, 1), cond, &s, 2000, 42).unwrap();
        let v: Vec<f64> = chains.iter().map(|c| c.data()[0]).collect();
        let (m, var) = mean_var(&v);
        let tol = (0.05 * target.mean.abs()).max(0.02);
        assert!((m - target.mean).abs() <= tol, "{cond}: mean {m}");
        let want = target.std * target.std;
        assert!((var - want).abs() / want <= 0.10, "{cond}: var {var}");
    }
}

#[test]
fn chains_are_reproducible() {
    let s = NoiseSchedule::linear(50, 1e-4, 0.02).unwrap();
    let d = ZeroDenoiser;
    let a = sample_chains(&d, (2, 3), Condition::Normal, &s, 8, 9).unwrap();
    assert_eq!(
        a,
        sample_chains(&d, (2, 3), Condition::Normal, &s, 8, 9).unwrap()
    );
    assert_ne!(
        a,
        sample_chains(&d, (2, 3), Condition::Normal, &s, 8, 10).unwrap()
    );
    assert_ne!(a[0], a[1]);
}

#[test]
fn zero_predictor_loss_is_unit_noise_power() {
    let s = default_schedule();
    let mut rng = seeded_rng(3);
    let batch: Vec<(Tensor2D, Condition)> = (0..400)
        .map(|_| (Tensor2D::randn((8, 8), &mut rng), Condition::Malignant))
        .collect();
    let loss = loss_simple(&ZeroDenoiser, &batch, &s, &mut rng).unwrap();
    assert!((loss - 1.0).abs() < 0.03, "{loss}");
    let d = GaussianOptimalDenoiser::unconditional(
        s.clone(),
        GaussianTarget {
            mean: 0.0,
            std: 1.0,
        },
    )
    .unwrap();
    let better = loss_simple(&d, &batch, &s, &mut rng).unwrap();
    assert!(better < loss, "{better} vs {loss}");
}

#[test]
fn step_bounds_are_checked() {
    let s = default_schedule();
    let x = Tensor2D::zeros((1, 1));
    assert!(q_sample(&x, 0, &x, &s).is_err());
    assert!(q_sample(&x, 1001, &x, &s).is_err());
    let mut rng = seeded_rng(0);
    assert!(p_sample_step(&x, 0, &ZeroDenoiser, Condition::Normal, &s, &mut rng).is_err());
    assert!(loss_simple(&ZeroDenoiser, &[], &s, &mut rng).is_err());
}
