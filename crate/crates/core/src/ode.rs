//! Adaptive Dormand-Prince 8(5,3) integration for small fixed-size systems.
//!
//! Both the fundamental-matrix system and the scalar Pruefer-angle equation run
//! through this core. A post-step hook lets callers project the state back onto
//! an invariant (the fundamental matrix is renormalized to unit determinant).

#![allow(clippy::excessive_precision)]

use crate::error::{Result, SpectralError};

/// Right-hand side `y' = f(z, y)` of an `N`-dimensional first-order system.
pub trait OdeSystem<const N: usize> {
    fn rhs(&self, z: f64, y: &[f64; N], dy: &mut [f64; N]);
}

/// Step-size control parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    pub h_max: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl {
            rtol: 1e-12,
            atol: 1e-12,
            max_steps: 2_000_000,
            h_max: f64::INFINITY,
        }
    }
}

/// Outcome of an adaptive integration over one interval.
#[derive(Debug, Clone, Copy)]
pub struct Advance<const N: usize> {
    pub y: [f64; N],
    /// Step size suggested for continuing past the interval end.
    pub h_next: f64,
    pub accepted: usize,
    pub rejected: usize,
}

const SAFE: f64 = 0.9;
const FAC_MIN: f64 = 1.0 / 3.0;
const FAC_MAX: f64 = 6.0;

/// Integrate from `z0` to `z1` (`z1 > z0`) starting with trial step `h0`.
///
/// `post` runs on every accepted state. When `mesh` is given, every accepted
/// step endpoint is appended to it so the identical step sequence can be
/// replayed with [`integrate_on_mesh`].
#[allow(clippy::too_many_arguments)]
pub fn integrate<S, P, const N: usize>(
    sys: &S,
    z0: f64,
    z1: f64,
    y0: [f64; N],
    h0: f64,
    control: &StepControl,
    mut post: P,
    mut mesh: Option<&mut Vec<f64>>,
) -> Result<Advance<N>>
where
    S: OdeSystem<N>,
    P: FnMut(&mut [f64; N]),
{
    let mut z = z0;
    let mut y = y0;
    let mut h = h0.abs().min(control.h_max).min(z1 - z0);
    let mut accepted = 0usize;
    let mut rejected = 0usize;
    let mut last_rejected = false;
    let mut h_next = h;

    if z1 <= z0 {
        return Ok(Advance {
            y,
            h_next: h0,
            accepted,
            rejected,
        });
    }

    let mut k1 = [0.0; N];
    sys.rhs(z, &y, &mut k1);

    while z < z1 {
        if accepted + rejected >= control.max_steps {
            return Err(SpectralError::MaxStepsExceeded {
                max_steps: control.max_steps,
                target: z1,
            });
        }
        if !h.is_finite() || h <= 16.0 * f64::EPSILON * z.abs().max(1.0) {
            return Err(SpectralError::StepSizeUnderflow { z, h });
        }
        let remaining = z1 - z;
        let last = h >= remaining * (1.0 - 1e-12);
        let z_new = if last { z1 } else { z + h };
        let h_step = z_new - z;

        let (y_new, err) = dop853_step(sys, z, &y, &k1, h_step, Some(control));
        let fac11 = err.powf(0.125);

        if err <= 1.0 && y_new.iter().all(|v| v.is_finite()) {
            accepted += 1;
            z = z_new;
            y = y_new;
            post(&mut y);
            if let Some(m) = mesh.as_deref_mut() {
                m.push(z);
            }
            sys.rhs(z, &y, &mut k1);
            let fac = (fac11 / SAFE).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
            let mut proposal = (h_step / fac).min(control.h_max);
            if last_rejected {
                proposal = proposal.min(h_step);
            }
            last_rejected = false;
            h_next = if last { h.max(proposal) } else { proposal };
            h = proposal;
        } else {
            rejected += 1;
            last_rejected = true;
            let shrink = if err.is_finite() {
                (fac11 / SAFE).min(1.0 / FAC_MIN)
            } else {
                1.0 / FAC_MIN
            };
            h = h_step / shrink.max(1.0);
        }
    }

    Ok(Advance {
        y,
        h_next,
        accepted,
        rejected,
    })
}

/// Replay a step sequence: one DOP853 step between each pair of consecutive
/// mesh points, no error control. `mesh[0]` is the start point.
pub fn integrate_on_mesh<S, P, const N: usize>(
    sys: &S,
    mesh: &[f64],
    y0: [f64; N],
    mut post: P,
) -> [f64; N]
where
    S: OdeSystem<N>,
    P: FnMut(&mut [f64; N]),
{
    let mut y = y0;
    let mut k1 = [0.0; N];
    for w in mesh.windows(2) {
        sys.rhs(w[0], &y, &mut k1);
        let (y_new, _) = dop853_step(sys, w[0], &y, &k1, w[1] - w[0], None);
        y = y_new;
        post(&mut y);
    }
    y
}

#[inline]
fn stage<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for i in 0..N {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        out[i] += h * acc;
    }
    out
}

/// One DOP853 step. Returns the 8th-order update and the scaled error norm
/// (zero when `control` is `None`).
fn dop853_step<S: OdeSystem<N>, const N: usize>(
    sys: &S,
    z: f64,
    y: &[f64; N],
    k1: &[f64; N],
    h: f64,
    control: Option<&StepControl>,
) -> ([f64; N], f64) {
    let mut k2 = [0.0; N];
    let mut k3 = [0.0; N];
    let mut k4 = [0.0; N];
    let mut k5 = [0.0; N];
    let mut k6 = [0.0; N];
    let mut k7 = [0.0; N];
    let mut k8 = [0.0; N];
    let mut k9 = [0.0; N];
    let mut k10 = [0.0; N];
    let mut k11 = [0.0; N];
    let mut k12 = [0.0; N];

    sys.rhs(z + C2 * h, &stage(y, h, &[(A21, k1)]), &mut k2);
    sys.rhs(z + C3 * h, &stage(y, h, &[(A31, k1), (A32, &k2)]), &mut k3);
    sys.rhs(z + C4 * h, &stage(y, h, &[(A41, k1), (A43, &k3)]), &mut k4);
    sys.rhs(
        z + C5 * h,
        &stage(y, h, &[(A51, k1), (A53, &k3), (A54, &k4)]),
        &mut k5,
    );
    sys.rhs(
        z + C6 * h,
        &stage(y, h, &[(A61, k1), (A64, &k4), (A65, &k5)]),
        &mut k6,
    );
    sys.rhs(
        z + C7 * h,
        &stage(y, h, &[(A71, k1), (A74, &k4), (A75, &k5), (A76, &k6)]),
        &mut k7,
    );
    sys.rhs(
        z + C8 * h,
        &stage(
            y,
            h,
            &[(A81, k1), (A84, &k4), (A85, &k5), (A86, &k6), (A87, &k7)],
        ),
        &mut k8,
    );
    sys.rhs(
        z + C9 * h,
        &stage(
            y,
            h,
            &[
                (A91, k1),
                (A94, &k4),
                (A95, &k5),
                (A96, &k6),
                (A97, &k7),
                (A98, &k8),
            ],
        ),
        &mut k9,
    );
    sys.rhs(
        z + C10 * h,
        &stage(
            y,
            h,
            &[
                (A101, k1),
                (A104, &k4),
                (A105, &k5),
                (A106, &k6),
                (A107, &k7),
                (A108, &k8),
                (A109, &k9),
            ],
        ),
        &mut k10,
    );
    sys.rhs(
        z + C11 * h,
        &stage(
            y,
            h,
            &[
                (A111, k1),
                (A114, &k4),
                (A115, &k5),
                (A116, &k6),
                (A117, &k7),
                (A118, &k8),
                (A119, &k9),
                (A1110, &k10),
            ],
        ),
        &mut k11,
    );
    let yy1 = stage(
        y,
        h,
        &[
            (A121, k1),
            (A124, &k4),
            (A125, &k5),
            (A126, &k6),
            (A127, &k7),
            (A128, &k8),
            (A129, &k9),
            (A1210, &k10),
            (A1211, &k11),
        ],
    );
    sys.rhs(z + h, &yy1, &mut k12);

    let mut bsum = [0.0; N];
    let mut y_new = *y;
    for i in 0..N {
        bsum[i] = B1 * k1[i]
            + B6 * k6[i]
            + B7 * k7[i]
            + B8 * k8[i]
            + B9 * k9[i]
            + B10 * k10[i]
            + B11 * k11[i]
            + B12 * k12[i];
        y_new[i] += h * bsum[i];
    }

    let Some(ctl) = control else {
        return (y_new, 0.0);
    };

    let mut err5 = 0.0;
    let mut err3 = 0.0;
    for i in 0..N {
        let sk = ctl.atol + ctl.rtol * y[i].abs().max(y_new[i].abs());
        let e3 = bsum[i] - BHH1 * k1[i] - BHH2 * k9[i] - BHH3 * k12[i];
        err3 += (e3 / sk).powi(2);
        let e5 = ER1 * k1[i]
            + ER6 * k6[i]
            + ER7 * k7[i]
            + ER8 * k8[i]
            + ER9 * k9[i]
            + ER10 * k10[i]
            + ER11 * k11[i]
            + ER12 * k12[i];
        err5 += (e5 / sk).powi(2);
    }
    let mut deno = err5 + 0.01 * err3;
    if deno <= 0.0 {
        deno = 1.0;
    }
    let err = h.abs() * err5 * (1.0 / (deno * N as f64)).sqrt();
    (y_new, err)
}

// Dormand-Prince 8(5,3) tableau (Hairer, Norsett & Wanner).
const C2: f64 = 0.526001519587677318785587544488E-01;
const C3: f64 = 0.789002279381515978178381316732E-01;
const C4: f64 = 0.118350341907227396726757197510E+00;
const C5: f64 = 0.281649658092772603273242802490E+00;
const C6: f64 = 0.333333333333333333333333333333E+00;
const C7: f64 = 0.25E+00;
const C8: f64 = 0.307692307692307692307692307692E+00;
const C9: f64 = 0.651282051282051282051282051282E+00;
const C10: f64 = 0.6E+00;
const C11: f64 = 0.857142857142857142857142857142E+00;

const A21: f64 = 5.26001519587677318785587544488E-2;
const A31: f64 = 1.97250569845378994544595329183E-2;
const A32: f64 = 5.91751709536136983633785987549E-2;
const A41: f64 = 2.95875854768068491816892993775E-2;
const A43: f64 = 8.87627564304205475450678981324E-2;
const A51: f64 = 2.41365134159266685502369798665E-1;
const A53: f64 = -8.84549479328286085344864962717E-1;
const A54: f64 = 9.24834003261792003115737966543E-1;
const A61: f64 = 3.7037037037037037037037037037E-2;
const A64: f64 = 1.70828608729473871279604482173E-1;
const A65: f64 = 1.25467687566822425016691814123E-1;
const A71: f64 = 3.7109375E-2;
const A74: f64 = 1.70252211019544039314978060272E-1;
const A75: f64 = 6.02165389804559606850219397283E-2;
const A76: f64 = -1.7578125E-2;
const A81: f64 = 3.70920001185047927108779319836E-2;
const A84: f64 = 1.70383925712239993810214054705E-1;
const A85: f64 = 1.07262030446373284651809199168E-1;
const A86: f64 = -1.53194377486244017527936158236E-2;
const A87: f64 = 8.27378916381402288758473766002E-3;
const A91: f64 = 6.24110958716075717114429577812E-1;
const A94: f64 = -3.36089262944694129406857109825E0;
const A95: f64 = -8.68219346841726006818189891453E-1;
const A96: f64 = 2.75920996994467083049415600797E1;
const A97: f64 = 2.01540675504778934086186788979E1;
const A98: f64 = -4.34898841810699588477366255144E1;
const A101: f64 = 4.77662536438264365890433908527E-1;
const A104: f64 = -2.48811461997166764192642586468E0;
const A105: f64 = -5.90290826836842996371446475743E-1;
const A106: f64 = 2.12300514481811942347288949897E1;
const A107: f64 = 1.52792336328824235832596922938E1;
const A108: f64 = -3.32882109689848629194453265587E1;
const A109: f64 = -2.03312017085086261358222928593E-2;
const A111: f64 = -9.3714243008598732571704021658E-1;
const A114: f64 = 5.18637242884406370830023853209E0;
const A115: f64 = 1.09143734899672957818500254654E0;
const A116: f64 = -8.14978701074692612513997267357E0;
const A117: f64 = -1.85200656599969598641566180701E1;
const A118: f64 = 2.27394870993505042818970056734E1;
const A119: f64 = 2.49360555267965238987089396762E0;
const A1110: f64 = -3.0467644718982195003823669022E0;
const A121: f64 = 2.27331014751653820792359768449E0;
const A124: f64 = -1.05344954667372501984066689879E1;
const A125: f64 = -2.00087205822486249909675718444E0;
const A126: f64 = -1.79589318631187989172765950534E1;
const A127: f64 = 2.79488845294199600508499808837E1;
const A128: f64 = -2.85899827713502369474065508674E0;
const A129: f64 = -8.87285693353062954433549289258E0;
const A1210: f64 = 1.23605671757943030647266201528E1;
const A1211: f64 = 6.43392746015763530355970484046E-1;

const B1: f64 = 5.42937341165687622380535766363E-2;
const B6: f64 = 4.45031289275240888144113950566E0;
const B7: f64 = 1.89151789931450038304281599044E0;
const B8: f64 = -5.8012039600105847814672114227E0;
const B9: f64 = 3.1116436695781989440891606237E-1;
const B10: f64 = -1.52160949662516078556178806805E-1;
const B11: f64 = 2.01365400804030348374776537501E-1;
const B12: f64 = 4.47106157277725905176885569043E-2;

const BHH1: f64 = 0.244094488188976377952755905512E+00;
const BHH2: f64 = 0.733846688281611857341361741547E+00;
const BHH3: f64 = 0.220588235294117647058823529412E-01;

const ER1: f64 = 0.1312004499419488073250102996E-01;
const ER6: f64 = -0.1225156446376204440720569753E+01;
const ER7: f64 = -0.4957589496572501915214079952E+00;
const ER8: f64 = 0.1664377182454986536961530415E+01;
const ER9: f64 = -0.3503288487499736816886487290E+00;
const ER10: f64 = 0.3341791187130174790297318841E+00;
const ER11: f64 = 0.8192320648511571246570742613E-01;
const ER12: f64 = -0.2235530786388629525884427845E-01;

#[cfg(test)]
mod tests {
    use super::*;

    struct Oscillator(f64);

    impl OdeSystem<2> for Oscillator {
        fn rhs(&self, _z: f64, y: &[f64; 2], dy: &mut [f64; 2]) {
            dy[0] = self.0 * y[1];
            dy[1] = -self.0 * y[0];
        }
    }

    struct Logistic;

    impl OdeSystem<1> for Logistic {
        fn rhs(&self, _z: f64, y: &[f64; 1], dy: &mut [f64; 1]) {
            dy[0] = y[0] * (1.0 - y[0]);
        }
    }

    #[test]
    fn harmonic_oscillator_to_tight_tolerance() {
        let w = 7.3;
        let adv = integrate(
            &Oscillator(w),
            0.0,
            std::f64::consts::PI,
            [1.0, 0.0],
            0.01,
            &StepControl::default(),
            |_| {},
            None,
        )
        .unwrap();
        let t = std::f64::consts::PI;
        assert!((adv.y[0] - (w * t).cos()).abs() < 1e-11);
        assert!((adv.y[1] + (w * t).sin()).abs() < 1e-11);
    }

    #[test]
    fn logistic_matches_closed_form() {
        let adv = integrate(
            &Logistic,
            0.0,
            3.0,
            [0.1],
            0.1,
            &StepControl::default(),
            |_| {},
            None,
        )
        .unwrap();
        let exact = 1.0 / (1.0 + 9.0 * (-3.0_f64).exp());
        assert!((adv.y[0] - exact).abs() < 1e-12);
    }

    #[test]
    fn mesh_replay_reproduces_adaptive_result() {
        let sys = Oscillator(3.0);
        let mut mesh = vec![0.0];
        let adv = integrate(
            &sys,
            0.0,
            2.0,
            [1.0, 0.5],
            0.05,
            &StepControl::default(),
            |_| {},
            Some(&mut mesh),
        )
        .unwrap();
        assert_eq!(*mesh.last().unwrap(), 2.0);
        let replay = integrate_on_mesh(&sys, &mesh, [1.0, 0.5], |_| {});
        assert_eq!(replay, adv.y);
    }

    #[test]
    fn max_steps_is_enforced() {
        let control = StepControl {
            max_steps: 3,
            ..StepControl::default()
        };
        let err = integrate(
            &Oscillator(50.0),
            0.0,
            10.0,
            [1.0, 0.0],
            1e-3,
            &control,
            |_| {},
            None,
        )
        .unwrap_err();
        assert!(matches!(err, SpectralError::MaxStepsExceeded { .. }));
    }
}
