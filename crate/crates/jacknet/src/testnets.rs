//! Bundled example networks and random-instance generators.
//!
//! Used by the test suites and shipped as the `examples/` network files.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::linalg::Matrix;
use crate::network::JacksonNetwork;

/// Two-queue tandem: lambda=(1,0), mu=(4,4), p_{12}=1.
pub fn net_a() -> JacksonNetwork {
    JacksonNetwork::new(
        vec![1.0, 0.0],
        vec![4.0, 4.0],
        vec![vec![0.0, 1.0], vec![0.0, 0.0]],
    )
    .unwrap()
}

/// Fully symmetric three-queue network: p=1/4, lambda=(1,1,1), mu=(9,9,9).
pub fn net_b() -> JacksonNetwork {
    let p = 0.25;
    JacksonNetwork::new(
        vec![1.0, 1.0, 1.0],
        vec![9.0, 9.0, 9.0],
        symmetric_routing(3, p),
    )
    .unwrap()
}

/// Three-node circle with p=0.2, q=0.3, lambda=(1,1,1), mu=(16,16,16).
pub fn net_c() -> JacksonNetwork {
    JacksonNetwork::new(
        vec![1.0, 1.0, 1.0],
        vec![16.0, 16.0, 16.0],
        circle_routing(0.2, 0.3),
    )
    .unwrap()
}

/// Single queue: lambda=1, mu=4.
pub fn net_d() -> JacksonNetwork {
    JacksonNetwork::new(vec![1.0], vec![4.0], vec![vec![0.0]]).unwrap()
}

/// Unstable tandem: lambda=(3,0), mu=(2,4).
pub fn net_e() -> JacksonNetwork {
    JacksonNetwork::new(
        vec![3.0, 0.0],
        vec![2.0, 4.0],
        vec![vec![0.0, 1.0], vec![0.0, 0.0]],
    )
    .unwrap()
}

/// Common off-diagonal routing probability p.
pub fn symmetric_routing(d: usize, p: f64) -> Matrix {
    (0..d)
        .map(|i| (0..d).map(|j| if i == j { 0.0 } else { p }).collect())
        .collect()
}

/// The 3-node circulant pattern: row i sends p to i+1 and q to i+2 (mod 3).
pub fn circle_routing(p: f64, q: f64) -> Matrix {
    (0..3)
        .map(|i| {
            (0..3)
                .map(|j| {
                    if j == (i + 1) % 3 {
                        p
                    } else if j == (i + 2) % 3 {
                        q
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect()
}

/// Random substochastic routing matrix with zero diagonal and row sums
/// at most `max_row_sum` (so the spectral radius is at most that bound).
pub fn random_routing<R: Rng>(rng: &mut R, d: usize, max_row_sum: f64) -> Matrix {
    let mut p = vec![vec![0.0; d]; d];
    for i in 0..d {
        if d == 1 {
            continue;
        }
        let mut row: Vec<f64> = (0..d)
            .map(|j| if j == i { 0.0 } else { rng.gen::<f64>() })
            .collect();
        let sum: f64 = row.iter().sum();
        let target = rng.gen::<f64>() * max_row_sum;
        if sum > 0.0 {
            for v in &mut row {
                *v *= target / sum;
            }
        }
        p[i] = row;
    }
    p
}

/// Random valid stable network with d queues (all arrival rates positive,
/// service rates comfortably above the effective arrival rates).
pub fn random_stable_network<R: Rng>(rng: &mut R, d: usize) -> JacksonNetwork {
    let p = random_routing(rng, d, 0.85);
    let lambda: Vec<f64> = (0..d).map(|_| 0.2 + rng.gen::<f64>() * 2.0).collect();
    let probe = JacksonNetwork::new(lambda.clone(), vec![1.0; d], p.clone()).unwrap();
    let ts = crate::network::solve_traffic(&probe).expect("random net must validate");
    let mu: Vec<f64> = ts
        .nu
        .iter()
        .map(|&nu_i| nu_i * (1.5 + rng.gen::<f64>() * 4.0))
        .collect();
    JacksonNetwork::new(lambda, mu, p).unwrap()
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
