//! Fixtures shared by the benchmarks.

use kgonal::loops::{random_admissible_walk, ClosedWalk};
use kgonal::presentation::sample_presentation;
use kgonal::{Complex2, ComplexBuilder, Presentation};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A seeded hexagonal presentation.
pub fn hex_presentation(n: usize, d: f64) -> Presentation {
    sample_presentation(n, 6, d, 0xBE7C).expect("valid parameters")
}

/// An `m × m` grid of commutator squares wrapped into a torus.
pub fn torus(m: usize) -> Complex2 {
    let mut b = ComplexBuilder::new();
    let faces: Vec<usize> = (0..m * m).map(|_| b.add_polygon(&[1, 2, -1, -2])).collect();
    for r in 0..m {
        for c in 0..m {
            let f = faces[r * m + c];
            let right = faces[r * m + (c + 1) % m];
            let up = faces[((r + 1) % m) * m + c];
            let (x, y) = (b.face_incidence(f, 1), b.face_incidence(right, 3));
            b.identify(x, y.reversed()).expect("b edges match");
            let (x, y) = (b.face_incidence(f, 2), b.face_incidence(up, 0));
            b.identify(x, y.reversed()).expect("a edges match");
        }
    }
    b.build(true).0
}

/// Admissible walks of the given length from a fixed seed.
pub fn walks(count: usize, len: usize) -> Vec<ClosedWalk> {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    (0..count).map(|_| random_admissible_walk(len, &mut rng)).collect()
}
