//! Lyapunov potential around a reference equilibrium.
//!
//! Each reference atom `x*_I` carries a bump
//! `φ_I(x) = exp(-d(x, x*_I)³ / (3τ³))` cut off at radius `λτ`; the stray
//! component `φ₀ = 1 - Σ φ_I` collects the rest. Particles are aggregated
//! against these bumps and
//!
//! ```text
//! V_wei = Σ_I d_h(a*_I, ā_I) + ā₀
//! V_pos = ½ Σ_I ā_I (‖x*_I - x̄_I‖² + tr Σ_I)
//! V     = Σ_players V_wei + (η/σ) V_pos
//! ```
//!
//! where `d_h(p, q) = p log(p/q) - p + q`.

use crate::geometry::DomainSpec;
use crate::particles::{min_separation, relative_entropy_scalar, Ensemble, SaddleState};
use crate::{Error, Result};

/// Reference equilibrium: atoms and weights for both players, plus the game
/// value when known.
#[derive(Clone, Debug, PartialEq)]
pub struct ReferenceMne {
    pub mu: Ensemble,
    pub nu: Ensemble,
    pub value: Option<f64>,
}

impl ReferenceMne {
    pub fn new(mu: Ensemble, nu: Ensemble, value: Option<f64>) -> Result<Self> {
        for e in [&mu, &nu] {
            if e.is_empty() {
                return Err(Error::InvalidArgument("reference has no atoms".into()));
            }
            if e.log_weights.iter().any(|w| !w.is_finite()) {
                return Err(Error::InvalidArgument("reference atoms need positive weights".into()));
            }
        }
        Ok(ReferenceMne { mu, nu, value })
    }

    /// Smallest same-label separation over both players (`+∞` for singletons).
    pub fn d_star(&self, x_domain: &DomainSpec, y_domain: &DomainSpec) -> Result<f64> {
        let d = min_separation(x_domain, &self.mu)?.min(min_separation(y_domain, &self.nu)?);
        if d <= 0.0 {
            return Err(Error::InvalidArgument("reference atoms are not distinct".into()));
        }
        Ok(d)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LyapunovMode {
    General,
    /// `φ_I` is the indicator of the closed metric ball of this radius.
    ExactParamIndicator { radius: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LyapunovParams {
    pub lambda: f64,
    pub tau: f64,
    pub eta_over_sigma: f64,
    pub mode: LyapunovMode,
}

impl LyapunovParams {
    /// Support radius of each bump.
    pub fn support_radius(&self) -> f64 {
        match self.mode {
            LyapunovMode::General => self.lambda * self.tau,
            LyapunovMode::ExactParamIndicator { radius } => radius,
        }
    }
}

/// Optional curvature data for the support radius.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurvatureTerm {
    /// Lower bound on the reference weights.
    pub w_lb: f64,
    pub sigma_min: f64,
    pub l3: f64,
}

/// `λ = σ^{-1/6}`, `λτ = min(√(σ/(2η)), d*/4[, ŵ σ_min / (4 L₃)])`.
pub fn default_lyapunov_params(
    eta: f64,
    sigma: f64,
    d_star: f64,
    curvature: Option<CurvatureTerm>,
) -> Result<LyapunovParams> {
    if !(eta > 0.0 && sigma > 0.0) {
        return Err(Error::InvalidArgument("eta and sigma must be positive".into()));
    }
    if !(d_star > 0.0) {
        return Err(Error::InvalidArgument("d* must be positive".into()));
    }
    let lambda = sigma.powf(-1.0 / 6.0);
    let mut radius = (sigma / (2.0 * eta)).sqrt().min(d_star / 4.0);
    if let Some(c) = curvature {
        radius = radius.min(c.w_lb * c.sigma_min / (4.0 * c.l3));
    }
    Ok(LyapunovParams {
        lambda,
        tau: radius / lambda,
        eta_over_sigma: eta / sigma,
        mode: LyapunovMode::General,
    })
}

/// Partition of unity subordinate to the atoms of one player.
#[derive(Clone, Copy, Debug)]
pub struct Partition<'a> {
    domain: &'a DomainSpec,
    atoms: &'a Ensemble,
    params: LyapunovParams,
}

impl<'a> Partition<'a> {
    /// Fails when the supports could overlap.
    pub fn new(domain: &'a DomainSpec, atoms: &'a Ensemble, params: LyapunovParams) -> Result<Self> {
        let radius = params.support_radius();
        if !(radius > 0.0) || (params.mode == LyapunovMode::General && !(params.tau > 0.0 && params.lambda > 0.0)) {
            return Err(Error::InvalidArgument("partition radius must be positive".into()));
        }
        let half_sep = min_separation(domain, atoms)? / 2.0;
        if radius >= half_sep {
            return Err(Error::OverlappingSupports { lambda_tau: radius, half_sep });
        }
        Ok(Partition { domain, atoms, params })
    }

    fn bump(&self, d: f64) -> f64 {
        match self.params.mode {
            LyapunovMode::General => {
                if d <= self.params.lambda * self.params.tau {
                    (-(d / self.params.tau).powi(3) / 3.0).exp()
                } else {
                    0.0
                }
            }
            LyapunovMode::ExactParamIndicator { radius } => {
                if d <= radius {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// `[φ₀, φ_1, …, φ_{n*}]` at a labelled point.
    pub fn values(&self, label: usize, x: &[f64]) -> Result<Vec<f64>> {
        let mut phi = vec![0.0; self.atoms.len() + 1];
        let mut covered = 0.0;
        for (i, atom) in self.atoms.positions.iter().enumerate() {
            if self.atoms.labels[i] != label {
                continue;
            }
            let v = self.bump(self.domain.distance(x, atom)?);
            phi[i + 1] = v;
            covered += v;
        }
        phi[0] = 1.0 - covered;
        Ok(phi)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AggregatedMoments {
    /// `[ā₀, ā_1, …, ā_{n*}]`, stray weight first.
    pub abar: Vec<f64>,
    /// `x̄_I`, or `None` when `ā_I = 0`.
    pub xbar: Vec<Option<Vec<f64>>>,
    /// `‖x*_I - x̄_I‖²` in the chart at `x*_I` (0 when `ā_I = 0`).
    pub bias_sq: Vec<f64>,
    /// `tr Σ_I` (0 when `ā_I = 0`).
    pub cov_trace: Vec<f64>,
}

/// Zeroth, first and second moments of `ensemble` under the partition
/// around `atoms`. Torus offsets are taken in the chart at each atom.
pub fn aggregated_moments(
    domain: &DomainSpec,
    ensemble: &Ensemble,
    atoms: &Ensemble,
    params: LyapunovParams,
) -> Result<AggregatedMoments> {
    let partition = Partition::new(domain, atoms, params)?;
    let a = ensemble.weights();
    let n_star = atoms.len();
    let mut abar = vec![0.0; n_star + 1];
    let mut members: Vec<Vec<(f64, Vec<f64>)>> = vec![Vec::new(); n_star];
    for i in 0..ensemble.len() {
        let phi = partition.values(ensemble.labels[i], &ensemble.positions[i])?;
        abar[0] += a[i] * phi[0];
        for big_i in 0..n_star {
            let w = a[i] * phi[big_i + 1];
            if w > 0.0 {
                abar[big_i + 1] += w;
                members[big_i].push((w, domain.chart_offset(&atoms.positions[big_i], &ensemble.positions[i])));
            }
        }
    }
    let mut xbar = Vec::with_capacity(n_star);
    let mut bias_sq = vec![0.0; n_star];
    let mut cov_trace = vec![0.0; n_star];
    for big_i in 0..n_star {
        let mass = abar[big_i + 1];
        if mass <= 0.0 {
            xbar.push(None);
            continue;
        }
        let dim = atoms.positions[big_i].len();
        let mut bias = vec![0.0; dim];
        for (w, off) in &members[big_i] {
            for (b, o) in bias.iter_mut().zip(off) {
                *b += w / mass * o;
            }
        }
        bias_sq[big_i] = bias.iter().map(|b| b * b).sum();
        cov_trace[big_i] = members[big_i]
            .iter()
            .map(|(w, off)| w / mass * off.iter().zip(&bias).map(|(o, b)| (o - b) * (o - b)).sum::<f64>())
            .sum();
        let mut mean: Vec<f64> = atoms.positions[big_i].iter().zip(&bias).map(|(x, b)| x + b).collect();
        if domain.is_torus() {
            mean = mean.into_iter().map(crate::geometry::reduce_mod1).collect();
        }
        xbar.push(Some(mean));
    }
    Ok(AggregatedMoments { abar, xbar, bias_sq, cov_trace })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LyapunovReport {
    pub v_wei_mu: f64,
    pub v_pos_mu: f64,
    pub v_wei_nu: f64,
    pub v_pos_nu: f64,
    /// `Σ V_wei + (η/σ) V_pos`; `+∞` when an atom has lost all its mass.
    pub v_total: f64,
    /// `Σ V_wei + V_pos`.
    pub v1: f64,
}

fn player_terms(
    domain: &DomainSpec,
    ensemble: &Ensemble,
    atoms: &Ensemble,
    params: LyapunovParams,
) -> Result<(f64, f64)> {
    let m = aggregated_moments(domain, ensemble, atoms, params)?;
    let a_star = atoms.weights();
    let mut v_wei = m.abar[0];
    let mut v_pos = 0.0;
    for (big_i, &target) in a_star.iter().enumerate() {
        let mass = m.abar[big_i + 1];
        v_wei += relative_entropy_scalar(target, mass);
        v_pos += 0.5 * mass * (m.bias_sq[big_i] + m.cov_trace[big_i]);
    }
    Ok((v_wei, v_pos))
}

pub fn lyapunov(
    x_domain: &DomainSpec,
    y_domain: &DomainSpec,
    state: &SaddleState,
    reference: &ReferenceMne,
    params: LyapunovParams,
) -> Result<LyapunovReport> {
    let (v_wei_mu, v_pos_mu) = player_terms(x_domain, &state.mu, &reference.mu, params)?;
    let (v_wei_nu, v_pos_nu) = player_terms(y_domain, &state.nu, &reference.nu, params)?;
    let v_wei = v_wei_mu + v_wei_nu;
    let v_pos = v_pos_mu + v_pos_nu;
    Ok(LyapunovReport {
        v_wei_mu,
        v_pos_mu,
        v_wei_nu,
        v_pos_nu,
        v_total: v_wei + params.eta_over_sigma * v_pos,
        v1: v_wei + v_pos,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::particles::kl_divergence;
    use proptest::prelude::*;
    use rand::Rng;

    fn general(lambda: f64, tau: f64) -> LyapunovParams {
        LyapunovParams { lambda, tau, eta_over_sigma: 1.0, mode: LyapunovMode::General }
    }

    fn torus_atoms() -> Ensemble {
        Ensemble::from_weights(&[0.3, 0.7], vec![vec![0.1], vec![0.6]]).unwrap()
    }

    #[test]
    fn partition_examples() {
        let t = DomainSpec::torus(1);
        let atoms = torus_atoms();
        let p = Partition::new(&t, &atoms, general(2.0, 0.05)).unwrap();
        assert_eq!(p.values(0, &[0.1]).unwrap(), vec![0.0, 1.0, 0.0]);
        let at_cut = p.values(0, &[0.7]).unwrap();
        assert!((at_cut[2] - (-8.0f64 / 3.0).exp()).abs() < 1e-12);
        assert_eq!(p.values(0, &[0.35]).unwrap(), vec![1.0, 0.0, 0.0]);
        // wraps around the torus
        let seam = Ensemble::uniform(vec![vec![0.02], vec![0.5]]).unwrap();
        let q = Partition::new(&t, &seam, general(2.0, 0.05)).unwrap();
        assert!(q.values(0, &[0.97]).unwrap()[1] > 0.0);
    }

    #[test]
    fn overlapping_supports_rejected() {
        let t = DomainSpec::torus(1);
        let atoms = torus_atoms();
        assert!(matches!(
            Partition::new(&t, &atoms, general(1.0, 0.25)),
            Err(Error::OverlappingSupports { .. })
        ));
    }

    proptest! {
        #[test]
        fn partition_sums_to_one(x in 0.0f64..1.0, lt in 0.001f64..0.249, lambda in 0.5f64..5.0) {
            let t = DomainSpec::torus(1);
            let atoms = torus_atoms();
            let p = Partition::new(&t, &atoms, general(lambda, lt / lambda)).unwrap();
            let phi = p.values(0, &[x]).unwrap();
            prop_assert!(phi.iter().all(|v| *v >= 0.0));
            prop_assert_eq!(phi.iter().sum::<f64>(), 1.0);
        }
    }

    #[test]
    fn moment_examples() {
        let t = DomainSpec::torus(1);
        let atoms = torus_atoms();
        let params = general(2.0, 0.05);
        let one = Ensemble::uniform(vec![vec![0.1]]).unwrap();
        let m = aggregated_moments(&t, &one, &atoms, params).unwrap();
        assert_eq!(m.abar, vec![0.0, 1.0, 0.0]);
        assert_eq!(m.xbar[0], Some(vec![0.1]));
        assert_eq!(m.xbar[1], None);
        assert_eq!(m.cov_trace[0], 0.0);

        // straddles 0 on the torus
        let delta = 0.02;
        let two = Ensemble::uniform(vec![vec![0.6 - delta], vec![0.6 + delta]]).unwrap();
        let m = aggregated_moments(&t, &two, &atoms, params).unwrap();
        assert!((m.xbar[1].as_ref().unwrap()[0] - 0.6).abs() < 1e-12);
        assert!((m.cov_trace[1] - delta * delta).abs() < 1e-12);
        let wrap = Ensemble::uniform(vec![vec![0.09], vec![0.99]]).unwrap();
        let atoms0 = Ensemble::uniform(vec![vec![0.04]]).unwrap();
        let m = aggregated_moments(&t, &wrap, &atoms0, general(1.0, 0.2)).unwrap();
        assert!((m.xbar[0].as_ref().unwrap()[0] - 0.04).abs() < 1e-12);
    }

    fn random_case(rng: &mut impl Rng) -> (DomainSpec, Ensemble, Ensemble, LyapunovParams) {
        let dim = rng.random_range(1..3);
        let t = DomainSpec::torus(dim);
        let n_star = rng.random_range(1..4);
        // atoms on a coarse lattice keep them well separated
        let mut atoms = Vec::new();
        while atoms.len() < n_star {
            let p: Vec<f64> = (0..dim).map(|_| rng.random_range(0..4) as f64 / 4.0).collect();
            if !atoms.contains(&p) {
                atoms.push(p);
            }
        }
        let aw: Vec<f64> = (0..n_star).map(|_| rng.random_range(0.1..1.0)).collect();
        let atoms = Ensemble::from_weights(&aw, atoms).unwrap();
        let n = rng.random_range(1..30);
        let pos: Vec<Vec<f64>> = (0..n).map(|_| t.random_point(rng)).collect();
        let w: Vec<f64> = (0..n).map(|_| rng.random_range(0.01..1.0)).collect();
        let e = Ensemble::from_weights(&w, pos).unwrap();
        let radius = rng.random_range(0.01..0.124);
        let lambda = rng.random_range(0.5..4.0);
        (t, e, atoms, general(lambda, radius / lambda))
    }

    #[test]
    fn bias_variance_identity() {
        let mut rng = crate::rng::substream(11, "test");
        for _ in 0..200 {
            let (t, e, atoms, params) = random_case(&mut rng);
            let m = aggregated_moments(&t, &e, &atoms, params).unwrap();
            let lhs: f64 = (0..atoms.len()).map(|i| m.abar[i + 1] * (m.bias_sq[i] + m.cov_trace[i])).sum();
            let p = Partition::new(&t, &atoms, params).unwrap();
            let a = e.weights();
            let mut rhs = 0.0;
            for i in 0..e.len() {
                let phi = p.values(0, &e.positions[i]).unwrap();
                for big_i in 0..atoms.len() {
                    rhs += a[i] * phi[big_i + 1] * t.distance(&atoms.positions[big_i], &e.positions[i]).unwrap().powi(2);
                }
            }
            assert!((lhs - rhs).abs() <= 1e-10);
        }
    }

    #[test]
    fn kl_decomposition() {
        let mut rng = crate::rng::substream(12, "test");
        for _ in 0..200 {
            let (t, e, atoms, params) = random_case(&mut rng);
            let m = aggregated_moments(&t, &e, &atoms, params).unwrap();
            let (v_wei, _) = player_terms(&t, &e, &atoms, params).unwrap();
            let mut target = vec![0.0];
            target.extend(atoms.weights());
            let direct = kl_divergence(&target, &m.abar).unwrap();
            if direct.is_infinite() {
                assert!(v_wei.is_infinite());
            } else {
                assert!((v_wei - direct).abs() <= 1e-12, "{v_wei} vs {direct}");
            }
        }
    }

    fn reference() -> ReferenceMne {
        ReferenceMne::new(torus_atoms(), Ensemble::uniform(vec![vec![0.25]]).unwrap(), None).unwrap()
    }

    #[test]
    fn zero_exactly_at_reference() {
        let t = DomainSpec::torus(1);
        let r = reference();
        let z = SaddleState::new(r.mu.clone(), r.nu.clone());
        let params = general(2.0, 0.05);
        let rep = lyapunov(&t, &t, &z, &r, params).unwrap();
        assert_eq!(rep.v_total, 0.0);
        assert_eq!(rep.v1, 0.0);

        // each defect alone makes V positive
        let moved = SaddleState::new(
            Ensemble::from_weights(&[0.3, 0.7], vec![vec![0.1], vec![0.61]]).unwrap(),
            r.nu.clone(),
        );
        assert!(lyapunov(&t, &t, &moved, &r, params).unwrap().v_pos_mu > 0.0);
        let reweighted = SaddleState::new(
            Ensemble::from_weights(&[0.4, 0.6], vec![vec![0.1], vec![0.6]]).unwrap(),
            r.nu.clone(),
        );
        assert!(lyapunov(&t, &t, &reweighted, &r, params).unwrap().v_wei_mu > 0.0);
        let spread = SaddleState::new(
            Ensemble::from_weights(&[0.3, 0.35, 0.35], vec![vec![0.1], vec![0.59], vec![0.61]]).unwrap(),
            r.nu.clone(),
        );
        let rep = lyapunov(&t, &t, &spread, &r, params).unwrap();
        assert!(rep.v_pos_mu > 0.0);
        let stray = SaddleState::new(
            Ensemble::from_weights(&[0.3, 0.6, 0.1], vec![vec![0.1], vec![0.6], vec![0.35]]).unwrap(),
            r.nu.clone(),
        );
        assert!(lyapunov(&t, &t, &stray, &r, params).unwrap().v_wei_mu > 0.0);
    }

    #[test]
    fn empty_atom_is_infinite() {
        let t = DomainSpec::torus(1);
        let r = reference();
        let z = SaddleState::new(Ensemble::uniform(vec![vec![0.1]]).unwrap(), r.nu.clone());
        let rep = lyapunov(&t, &t, &z, &r, general(2.0, 0.05)).unwrap();
        assert_eq!(rep.v_wei_mu, f64::INFINITY);
        assert_eq!(rep.v_total, f64::INFINITY);
    }

    #[test]
    fn wide_bandwidth_matches_indicator() {
        let t = DomainSpec::torus(1);
        let r = reference();
        let radius = 0.1;
        let mut rng = crate::rng::substream(13, "test");
        for _ in 0..50 {
            let mut pos = Vec::new();
            for atom in [0.1, 0.6] {
                for _ in 0..3 {
                    pos.push(vec![crate::geometry::reduce_mod1(atom + rng.random_range(-radius..radius))]);
                }
            }
            let w: Vec<f64> = (0..6).map(|_| rng.random_range(0.1..1.0)).collect();
            let z = SaddleState::new(
                Ensemble::from_weights(&w, pos).unwrap(),
                Ensemble::uniform(vec![vec![0.25 + rng.random_range(-radius..radius)]]).unwrap(),
            );
            let tau = 1e6;
            let g = general(radius / tau, tau);
            let ind = LyapunovParams { mode: LyapunovMode::ExactParamIndicator { radius }, ..g };
            let a = lyapunov(&t, &t, &z, &r, g).unwrap();
            let b = lyapunov(&t, &t, &z, &r, ind).unwrap();
            assert!((a.v_total - b.v_total).abs() <= 1e-8);
        }
    }

    #[test]
    fn default_params_examples() {
        let p = default_lyapunov_params(0.01, 0.01, 0.5, None).unwrap();
        assert!((p.lambda - 10f64.powf(1.0 / 3.0)).abs() < 1e-12);
        assert!((p.lambda - 2.15443).abs() < 1e-5);
        assert!((p.support_radius() - 0.125).abs() < 1e-15);
        assert!((p.tau - 0.125 / 10f64.powf(1.0 / 3.0)).abs() < 1e-15);
        let wide = default_lyapunov_params(0.01, 0.01, 10.0, None).unwrap();
        assert!((wide.support_radius() - 0.5f64.sqrt()).abs() < 1e-15);
        let curved = default_lyapunov_params(
            0.01,
            0.01,
            10.0,
            Some(CurvatureTerm { w_lb: 0.1, sigma_min: 1.0, l3: 1.0 }),
        )
        .unwrap();
        assert!((curved.support_radius() - 0.025).abs() < 1e-15);
    }
}
