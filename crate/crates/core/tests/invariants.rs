use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wr3l::deconv::{rl_step, rrrl_step, DivergenceLut, FourierBlur2D, Scenario, SharpeningState, Deconvolver};
use wr3l::fft::{fft_forward_real, FourierPlan};
use wr3l::synth::{add_gaussian_noise, snr, synth_blur, test_scene};
use wr3l::{Axis, DeconvParams, Image, Psf};

fn crop(img: &Image, margin: usize) -> Image {
    Image::from_fn(img.width() - 2 * margin, img.height() - 2 * margin, |x, y| {
        img.get(x + margin, y + margin)
    })
}

#[test]
fn rl_keeps_the_mean_with_periodic_blur() {
    let psf = Psf::linear_motion(9.0, 20.0).unwrap();
    let op = FourierBlur2D::new(&psf, 64, 64).unwrap();
    let g = test_scene(64, 64).map(|v| v + 1.0);
    let f = wr3l::fft::fourier_convolve(&g, &psf).unwrap();
    let mut u = f.clone();
    for k in 0..30 {
        u = rl_step(&u, &f, &op).unwrap();
        let drift = (u.mean() - f.mean()).abs() / f.mean();
        assert!(drift < 0.01, "iteration {k}: mean drift {drift}");
    }
}

#[test]
fn rl_shows_semi_convergence_under_noise() {
    let g = test_scene(128, 128);
    let psf = Psf::uniform_box(Axis::Horizontal, 9.0).unwrap();
    let f = add_gaussian_noise(&synth_blur(&g, &psf, true).unwrap(), 10.0, 3).unwrap();
    let d = Deconvolver::new(&psf, 128, 128, DeconvParams::default(), Scenario::Box1D).unwrap();
    let f = wr3l::image::clamp_floor(&f, 0.1).unwrap();
    let mut u = f.clone();
    let mut history = vec![snr(&crop(&u, 16), &crop(&g, 16))];
    for _ in 0..200 {
        u = rl_step(&u, &f, d.operator()).unwrap();
        history.push(snr(&crop(&u, 16), &crop(&g, 16)));
    }
    let (best, _) = history
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .unwrap();
    assert!(best > 0 && best < 200, "SNR maximum at iteration {best}");
    assert!(history[best] > history[200] + 0.1);
    assert!(history[best] > history[0] + 0.1);
}

#[test]
fn box_and_fourier_scenarios_agree_in_the_interior() {
    // Boundary differences travel about one support width per convolution,
    // so 5 iterations reach ~105 rows for length 21; margins are 128.
    let core = test_scene(32, 256);
    let g = Image::from_fn(32, 512, |x, y| if (128..384).contains(&y) { core.get(x, y - 128) } else { 120.0 });
    for len in [21.0, 15.5] {
        let psf = Psf::uniform_box(Axis::Vertical, len).unwrap();
        let f = synth_blur(&g, &psf, false).unwrap();
        let params = DeconvParams::default();
        let run = |s| Deconvolver::new(&psf, 32, 512, params, s).unwrap().run(&f).unwrap();
        let (boxed, fourier) = (run(Scenario::Box1D), run(Scenario::Fourier1D));
        let mut worst: f64 = 0.0;
        for y in 128..384 {
            for x in 0..32 {
                worst = worst.max((boxed.get(x, y) - fourier.get(x, y)).abs());
            }
        }
        assert!(worst < 1e-6, "length {len}: interior deviation {worst}");
        // near the image edge the two boundary rules do differ
        assert!(boxed.max_abs_diff(&fourier) > worst);
    }
}

#[test]
fn rrrl_denominator_stays_positive() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let lut = DivergenceLut::new();
    let params = DeconvParams::default();
    for case in 0..20 {
        let psf = match case % 3 {
            0 => Psf::uniform_box(Axis::Vertical, rng.gen_range(1.0..15.0)).unwrap(),
            1 => Psf::general_1d(Axis::Horizontal, (0..5).map(|_| rng.gen_range(0.0..1.0)).collect(), 2).unwrap(),
            _ => Psf::linear_motion(rng.gen_range(2.0..12.0), rng.gen_range(0.0..180.0)).unwrap(),
        };
        let d = Deconvolver::new(&psf, 32, 32, params, Scenario::auto(&psf)).unwrap();
        let f = Image::from_fn(32, 32, |_, _| rng.gen_range(0.1..255.0));
        let mut state = SharpeningState::new(f.clone()).unwrap();
        for _ in 0..10 {
            rrrl_step(&mut state, &f, d.operator(), &lut, &params).unwrap();
        }
        assert!(state.min_denominator > 0.0, "case {case}: {}", state.min_denominator);
        assert!(state.iterate.min() > 0.0);
    }
}

#[test]
fn reused_plan_is_bit_identical() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let signal: Vec<f64> = (0..64).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let plan = FourierPlan::new(64).unwrap();
    let first = fft_forward_real(&plan, &signal).unwrap();
    for _ in 0..10_000 {
        std::hint::black_box(fft_forward_real(&plan, &signal).unwrap());
    }
    let fresh = fft_forward_real(&FourierPlan::new(64).unwrap(), &signal).unwrap();
    assert_eq!(fft_forward_real(&plan, &signal).unwrap(), first);
    assert_eq!(fresh, first);
}

#[test]
fn deblurring_beats_blur_on_a_small_corpus() {
    let g = test_scene(128, 128);
    for (psf, sigma) in [
        (Psf::uniform_box(Axis::Horizontal, 11.0).unwrap(), 0.0),
        (Psf::uniform_box(Axis::Horizontal, 7.5).unwrap(), 3.0),
        (Psf::general_1d(Axis::Horizontal, vec![0.1, 0.2, 0.4, 0.2, 0.1], 2).unwrap(), 2.0),
    ] {
        let f = add_gaussian_noise(&synth_blur(&g, &psf, true).unwrap(), sigma, 5).unwrap().quantized();
        let restored = wr3l::deconv::wr3l(&f, &psf, &DeconvParams::default(), Scenario::auto(&psf)).unwrap();
        assert!(snr(&restored, &g) > snr(&f, &g), "{psf} sigma {sigma}");
    }
}
