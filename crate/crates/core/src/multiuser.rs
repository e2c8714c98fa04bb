//! One transmitter serving two or three receivers at once.
//!
//! Each receiver listens on its strongest coil(s). For every stream the
//! transmitter picks a precoder that the other streams' coupling rows
//! cannot see, so receivers get interference-free scalar channels. The
//! received amplitude of row `m` under currents `x` is the bilinear `m . x`,
//! so the zero-forcing constraint is `m_j . u_i = 0` without conjugation.

use crate::coupling::{coupling_from_kernel, random_frame_with, TriAxisFrame};
use crate::error::{invalid, Result};
use crate::linalg::{bilinear, svd3, CMatrix3, CVector3};
use crate::strategies::{draw_rng, reliability_of, LinkBudget, ReliabilityReport};
use num_complex::Complex64;
use rayon::prelude::*;

/// Effective gain `|m_i . u_i| / ||m_i||` below which a precoder is flagged.
pub const WEAK_STREAM: f64 = 1e-6;

/// Coupling of one receiver's three coils to the transmitter's three coils.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UserChannel {
    pub id: usize,
    /// Row `q` couples receive coil `q` to the transmit coils.
    pub m: CMatrix3,
}

impl UserChannel {
    pub fn row(&self, q: usize) -> CVector3 {
        self.m.row(q).transpose()
    }

    fn row_norms(&self) -> [f64; 3] {
        [0, 1, 2].map(|q| self.row(q).norm())
    }
}

/// Receive coil with the largest coupling row; ties go to the lowest index.
pub fn select_receive_coil(uc: &UserChannel) -> usize {
    ranked_coils(uc)[0]
}

/// Receive coils ordered by decreasing row norm, stable on ties.
pub fn ranked_coils(uc: &UserChannel) -> [usize; 3] {
    let n = uc.row_norms();
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| n[b].partial_cmp(&n[a]).unwrap_or(std::cmp::Ordering::Equal));
    order
}

/// Zero-forcing precoders for a set of selected rows, one stream per row.
#[derive(Debug, Clone, PartialEq)]
pub struct PrecodeSet {
    /// Unit transmit-current directions, one per stream.
    pub precoders: Vec<CVector3>,
    /// Mean power per stream, W.
    pub powers: Vec<f64>,
    /// Receiver served by each stream.
    pub stream_user: Vec<usize>,
    /// Streams whose own channel is nearly parallel to the others'.
    pub weak: Vec<bool>,
}

impl PrecodeSet {
    pub fn has_warning(&self) -> bool {
        self.weak.iter().any(|&w| w)
    }
}

/// Precoder `u_i` orthogonal (bilinearly) to every row but `i`.
///
/// The stacked other rows are zero-padded to 3x3; the right singular
/// vectors of the vanishing singular values span their null space. With two
/// streams that space is two-dimensional and the precoder is the direction
/// in it that best matches row `i`. The phase makes `m_i . u_i` real and
/// positive.
pub fn nullspace_precoders(rows: &[CVector3], total_power: f64) -> Result<PrecodeSet> {
    if !(rows.len() == 2 || rows.len() == 3) {
        return Err(invalid(format!("need 2 or 3 selected rows, got {}", rows.len())));
    }
    if rows.iter().any(|r| r.iter().any(|z| !(z.re.is_finite() && z.im.is_finite()))) {
        return Err(invalid("coupling rows must be finite"));
    }
    let mut precoders = Vec::with_capacity(rows.len());
    let mut weak = Vec::with_capacity(rows.len());
    for (i, own) in rows.iter().enumerate() {
        let mut stacked = CMatrix3::zeros();
        for (r, other) in rows.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, m)| m).enumerate() {
            stacked.set_row(r, &other.transpose());
        }
        let svd = svd3(&stacked);
        let others = rows.len() - 1;
        let null = svd.v.columns(others, 3 - others).into_owned();
        // Best direction inside the null space for m_i . u.
        let target = own.map(|z| z.conj());
        let mut u = &null * (null.adjoint() * target);
        if u.norm() <= f64::EPSILON * target.norm() || target.norm() == 0.0 {
            u = null.column(0).into_owned();
        }
        u /= Complex64::new(u.norm(), 0.0);
        let g = bilinear(own, &u);
        if g.norm() > 0.0 {
            u *= g.conj() / g.norm();
        }
        let gain = bilinear(own, &u).norm();
        weak.push(own.norm() == 0.0 || gain < WEAK_STREAM * own.norm());
        precoders.push(u);
    }
    let n = rows.len();
    Ok(PrecodeSet {
        precoders,
        powers: vec![total_power / n as f64; n],
        stream_user: (0..n).collect(),
        weak,
    })
}

/// Worst `|m_j . u_i| / ||m_j||` over pairs `i != j`.
pub fn max_leakage(rows: &[CVector3], set: &PrecodeSet) -> f64 {
    let mut worst = 0.0f64;
    for (i, u) in set.precoders.iter().enumerate() {
        for (j, m) in rows.iter().enumerate() {
            if i != j && m.norm() > 0.0 {
                worst = worst.max(bilinear(m, u).norm() / m.norm());
            }
        }
    }
    worst
}

/// Per-user rates and the precoding behind them.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiuserResult {
    /// bit/s/Hz for each user, in input order.
    pub capacities: Vec<f64>,
    /// Rate of each stream.
    pub stream_capacities: Vec<f64>,
    /// Receive coil that carries each stream.
    pub stream_coils: Vec<usize>,
    pub precode: PrecodeSet,
    pub rows: Vec<CVector3>,
}

/// Rate of each zero-forced stream at `P/streams` per stream.
pub fn stream_rates(rows: &[CVector3], lb: &LinkBudget) -> Result<(Vec<f64>, PrecodeSet)> {
    let set = nullspace_precoders(rows, lb.transmit_power)?;
    let g = lb.gain_per_watt();
    let rates = rows
        .iter()
        .zip(set.precoders.iter().zip(set.powers.iter()))
        .map(|(m, (u, p))| (g * p * bilinear(m, u).norm_sqr()).ln_1p() / std::f64::consts::LN_2)
        .collect();
    Ok((rates, set))
}

/// Downlink rates for two or three receivers.
///
/// Three receivers get one stream each on their best coil. With two, the
/// first receiver takes two streams on its two best coils and the second
/// one stream.
pub fn multiuser_rates(users: &[UserChannel], lb: &LinkBudget) -> Result<MultiuserResult> {
    let (rows, owners, coils): (Vec<CVector3>, Vec<usize>, Vec<usize>) = match users.len() {
        3 => {
            let mut r = Vec::new();
            for u in users {
                let q = select_receive_coil(u);
                r.push((u.row(q), u.id, q));
            }
            unzip3(r)
        }
        2 => {
            let best = ranked_coils(&users[0]);
            let q2 = select_receive_coil(&users[1]);
            unzip3(vec![
                (users[0].row(best[0]), users[0].id, best[0]),
                (users[0].row(best[1]), users[0].id, best[1]),
                (users[1].row(q2), users[1].id, q2),
            ])
        }
        n => return Err(invalid(format!("multiuser needs 2 or 3 receivers, got {n}"))),
    };
    let (stream_capacities, mut precode) = stream_rates(&rows, lb)?;
    let index_of = |id: usize| users.iter().position(|u| u.id == id).expect("owner is a user");
    precode.stream_user = owners.iter().map(|&id| index_of(id)).collect();
    let mut capacities = vec![0.0; users.len()];
    for (s, &u) in precode.stream_user.iter().enumerate() {
        capacities[u] += stream_capacities[s];
    }
    Ok(MultiuserResult {
        capacities,
        stream_capacities,
        stream_coils: coils,
        precode,
        rows,
    })
}

fn unzip3(v: Vec<(CVector3, usize, usize)>) -> (Vec<CVector3>, Vec<usize>, Vec<usize>) {
    let mut a = Vec::new();
    let mut b = Vec::new();
    let mut c = Vec::new();
    for (x, y, z) in v {
        a.push(x);
        b.push(y);
        c.push(z);
    }
    (a, b, c)
}

/// Random orientations of the transmitter and every receiver for one draw.
#[derive(Debug, Clone, PartialEq)]
pub struct SwarmDraw {
    pub tx: TriAxisFrame,
    pub rx: Vec<TriAxisFrame>,
}

pub fn swarm_draw(receivers: usize, seed: u64, index: u64) -> SwarmDraw {
    let mut rng = draw_rng(seed, index);
    let tx = random_frame_with(&mut rng);
    let rx = (0..receivers).map(|_| random_frame_with(&mut rng)).collect();
    SwarmDraw { tx, rx }
}

/// Channels of every receiver for one draw.
pub fn swarm_channels(kernels: &[CMatrix3], draw: &SwarmDraw) -> Vec<UserChannel> {
    kernels
        .iter()
        .zip(draw.rx.iter())
        .enumerate()
        .map(|(id, (k, rx))| UserChannel {
            id,
            m: coupling_from_kernel(k, &draw.tx, rx).m,
        })
        .collect()
}

/// Per-user capacities of `draws` random swarm orientations, in draw order.
pub fn multiuser_draws(kernels: &[CMatrix3], lb: &LinkBudget, draws: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    (0..draws as u64)
        .into_par_iter()
        .map(|i| {
            let d = swarm_draw(kernels.len(), seed, i);
            multiuser_rates(&swarm_channels(kernels, &d), lb).map(|r| r.capacities)
        })
        .collect()
}

/// Reliability of each user over the draws.
pub fn multiuser_reliability(per_draw: &[Vec<f64>]) -> Vec<ReliabilityReport> {
    let users = per_draw.first().map_or(0, |d| d.len());
    (0..users)
        .map(|u| reliability_of(&per_draw.iter().map(|d| d[u]).collect::<Vec<_>>()))
        .collect()
}
