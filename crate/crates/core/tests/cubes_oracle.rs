use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sos_kernel::cubes::{compressed_cell_oracle, union_measures, CubeSet, UnionMeasures};
use sos_kernel::Rational;

fn cube_set(side: i64, lows: &[[i64; 3]]) -> CubeSet {
    CubeSet::new(Rational::from(side), lows.iter().map(|l| l.map(Rational::from)).collect()).unwrap()
}

/// Unit-voxel counts for unit cubes at integer positions in `[0, size)`.
fn voxel_measures(lows: &[[i64; 3]], size: usize) -> UnionMeasures {
    let n = size + 2;
    let idx = |x: usize, y: usize, z: usize| (x * n + y) * n + z;
    let mut filled = vec![false; n * n * n];
    for l in lows {
        filled[idx(l[0] as usize + 1, l[1] as usize + 1, l[2] as usize + 1)] = true;
    }
    let at = |p: [usize; 3]| filled[idx(p[0], p[1], p[2])];
    let (mut volume, mut area, mut edges) = (0i64, 0i64, 0i64);
    for x in 1..n {
        for y in 1..n {
            for z in 1..n {
                let p = [x, y, z];
                volume += at(p) as i64;
                for a in 0..3 {
                    let mut q = p;
                    q[a] -= 1;
                    area += (at(p) != at(q)) as i64;
                    // Edge along axis a at the lattice line shared by the
                    // four voxels p - e_b - e_c, p - e_b, p - e_c, p.
                    let (b, c) = ((a + 1) % 3, (a + 2) % 3);
                    let mut pb = p;
                    pb[b] -= 1;
                    let mut pc = p;
                    pc[c] -= 1;
                    let mut pbc = pb;
                    pbc[c] -= 1;
                    let cells = [at(pbc), at(pb), at(pc), at(p)];
                    let count = cells.iter().filter(|&&v| v).count();
                    if count == 1 || count == 3 || (count == 2 && cells[0] == cells[3]) {
                        edges += 1;
                    }
                }
            }
        }
    }
    UnionMeasures {
        volume: volume.into(),
        area: area.into(),
        edge_length: edges.into(),
    }
}

fn random_lows(rng: &mut ChaCha8Rng, n: usize, max: i64) -> Vec<[i64; 3]> {
    (0..n).map(|_| [0; 3].map(|_| rng.gen_range(0..=max))).collect()
}

#[test]
fn voxel_oracle_agrees_with_cell_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..40 {
        let n = rng.gen_range(1..=12);
        let lows = random_lows(&mut rng, n, 4);
        assert_eq!(compressed_cell_oracle(&cube_set(1, &lows)), voxel_measures(&lows, 5), "{lows:?}");
    }
}

#[test]
fn three_small_cubes_match_voxels() {
    let lows = [[0, 0, 0], [1, 1, 0], [1, 0, 1]];
    let expected = voxel_measures(&lows, 4);
    assert_eq!(compressed_cell_oracle(&cube_set(1, &lows)), expected);
    assert_eq!(union_measures(&cube_set(1, &lows)).unwrap(), expected);
}

#[test]
fn dense_random_sets_match_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..60 {
        let n = rng.gen_range(1..=60);
        let lows = random_lows(&mut rng, n, 3);
        let s = cube_set(1, &lows);
        assert_eq!(union_measures(&s).unwrap(), compressed_cell_oracle(&s), "{lows:?}");
    }
}

#[test]
fn larger_sides_and_offsets() {
    // Side 2 on a unit lattice gives partial overlaps as well as contacts.
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..30 {
        let n = rng.gen_range(1..=25);
        let lows = random_lows(&mut rng, n, 5);
        let s = cube_set(2, &lows);
        assert_eq!(union_measures(&s).unwrap(), compressed_cell_oracle(&s), "{lows:?}");
    }
}

#[test]
fn contact_kinds_share_one_code_path() {
    // Face, edge and corner contacts, plus a vertex on a face.
    let cases: [&[[i64; 3]]; 4] = [
        &[[0, 0, 0], [2, 0, 0]],
        &[[0, 0, 0], [2, 2, 0]],
        &[[0, 0, 0], [2, 2, 2]],
        &[[0, 0, 0], [2, 1, 1]],
    ];
    for lows in cases {
        let s = cube_set(2, lows);
        assert_eq!(union_measures(&s).unwrap(), compressed_cell_oracle(&s), "{lows:?}");
    }
}

fn lows_strategy(max_n: usize, max: i64) -> impl Strategy<Value = Vec<[i64; 3]>> {
    prop::collection::vec(prop::array::uniform3(0..=max), 1..=max_n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn matches_oracle(lows in lows_strategy(40, 4)) {
        let s = cube_set(1, &lows);
        prop_assert_eq!(union_measures(&s).unwrap(), compressed_cell_oracle(&s));
    }

    #[test]
    fn order_does_not_matter(lows in lows_strategy(30, 3), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let mut shuffled = lows.clone();
        shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(union_measures(&cube_set(1, &lows)).unwrap(), union_measures(&cube_set(1, &shuffled)).unwrap());
    }

    #[test]
    fn volume_is_monotone(lows in lows_strategy(30, 3), extra in prop::array::uniform3(0i64..=3)) {
        let before = union_measures(&cube_set(1, &lows)).unwrap().volume;
        let mut more = lows.clone();
        more.push(extra);
        prop_assert!(union_measures(&cube_set(1, &more)).unwrap().volume >= before);
    }
}
