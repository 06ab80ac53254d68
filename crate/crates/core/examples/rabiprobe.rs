use ionkick_core::species::make_species;
use ionkick_core::thermal::thermal_rabi_pdown_g;
use ionkick_core::constants::K_B;
use std::f64::consts::{FRAC_PI_2, TAU};

fn model(e: f64, p: &[f64; 3], gfac: f64) -> f64 {
    let g = gfac / p[1];
    let theta = FRAC_PI_2 * e / p[0];
    0.5 + p[2] * (thermal_rabi_pdown_g(theta, g).unwrap() - 0.5)
}

fn sigma_t(e_lo: f64, e_hi: f64, npts: usize, reps: f64, gfac: f64) -> f64 {
    let truth = [38e-9, 0.5e-3, 0.7f64];
    let mut fisher = [[0.0f64; 3]; 3];
    for k in 0..npts {
        let e = e_lo + (e_hi - e_lo) * k as f64 / (npts - 1) as f64;
        let p0 = model(e, &truth, gfac);
        let var = (p0 * (1.0 - p0) / reps).max(0.25 / reps);
        let mut grad = [0.0f64; 3];
        for j in 0..3 {
            let h = truth[j] * 1e-5;
            let mut up = truth; up[j] += h;
            let mut dn = truth; dn[j] -= h;
            grad[j] = (model(e, &up, gfac) - model(e, &dn, gfac)) / (2.0 * h);
        }
        for a in 0..3 { for b in 0..3 { fisher[a][b] += grad[a] * grad[b] / var; } }
    }
    // invert 3x3
    let m = fisher;
    let det = m[0][0]*(m[1][1]*m[2][2]-m[1][2]*m[2][1]) - m[0][1]*(m[1][0]*m[2][2]-m[1][2]*m[2][0]) + m[0][2]*(m[1][0]*m[2][1]-m[1][1]*m[2][0]);
    let c11 = (m[0][0]*m[2][2]-m[0][2]*m[2][0])/det;
    c11.sqrt()
}

fn main() {
    let species = make_species("Ba138+").unwrap();
    let ctx_w: f64 = 8.5e-6; let m = species.mass(); let w = TAU * 32.4e3;
    let gfac = ctx_w * ctx_w * m * w * w / (2.0 * K_B);
    for (hi, n) in [(128.0, 60), (180.0, 90), (180.0, 240), (250.0, 120), (250.0, 240), (300.0, 150)] {
        let s = sigma_t(2e-9, hi * 1e-9, n, 1000.0, gfac);
        println!("grid 2..{hi} nJ, {n} pts: sigma_T = {:.4} mK", s * 1e3);
    }
}
