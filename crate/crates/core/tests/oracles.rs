mod common;

use std::collections::{BTreeSet, HashSet};

use common::*;
use kgonal::complex::disc::{cut_path_search, verify_easy_cutting, DiscDiagram, HullDecomposition};
use kgonal::complex::search::{enumerate_fulfilled, local_isoperimetry_violations, SearchBudget};
use kgonal::loops::*;
use kgonal::presentation::*;
use kgonal::walls::*;
use kgonal::{Complex2, ComplexBuilder, Presentation};

/// Every word of length `k` over `±1..=±n`, cyclically reduced or not.
fn all_words(n: i32, k: usize) -> Vec<Vec<i32>> {
    let letters: Vec<i32> = (1..=n).flat_map(|a| [a, -a]).collect();
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out.into_iter().flat_map(|w| letters.iter().map(move |&l| [w.clone(), vec![l]].concat())).collect();
    }
    out
}

fn brute_cyclically_reduced(w: &[i32]) -> bool {
    (0..w.len()).all(|i| w[i] != -w[(i + 1) % w.len()])
}

#[test]
fn wraparound_pair_is_not_cyclically_reduced() {
    assert!(!brute_cyclically_reduced(&[1, 2, -1]));
    assert!(!is_cyclically_reduced(&[1, 2, -1]).unwrap());
}

#[test]
fn counts_match_enumeration() {
    for n in 1..=2 {
        for k in 1..=6 {
            let brute: BTreeSet<Vec<i32>> =
                all_words(n as i32, k).into_iter().filter(|w| brute_cyclically_reduced(w)).collect();
            assert_eq!(count_cyclically_reduced(n, k).unwrap(), brute.len() as u128, "n={n} k={k}");
            let listed: BTreeSet<Vec<i32>> = enumerate_cyclically_reduced(n, k).unwrap().into_iter().collect();
            assert_eq!(listed, brute);
        }
    }
    assert_eq!(count_cyclically_reduced(1, 2).unwrap(), 2);
    assert_eq!(count_cyclically_reduced(2, 3).unwrap(), 28);
}

#[test]
fn relator_counts() {
    assert_eq!(relator_count(4, 4, 0.25).unwrap(), 7);
    assert_eq!(relator_count(3, 6, 1.0 / 3.0).unwrap(), 25);
    assert_eq!(relator_count(1, 2, 0.5).unwrap(), 1);
    assert_eq!(relator_count(1, 2, 0.999).unwrap(), 1);
}

#[test]
fn one_generator_samples() {
    let allowed = [vec![1, 1], vec![-1, -1]];
    let mut seen = HashSet::new();
    for seed in 0..32 {
        let p = sample_presentation(1, 2, 0.5, seed).unwrap();
        assert_eq!(p.relators().len(), 1);
        assert!(allowed.contains(&p.relators()[0]));
        seen.insert(p.relators()[0].clone());
    }
    assert_eq!(seen.len(), 2);
}

#[test]
fn triangular_grouping() {
    let p = Presentation::new(3, 6, None, vec![vec![1, 2, 3, 1, 2, 3]]).unwrap();
    let t = hex_to_tri_encode(&p).unwrap();
    let pairs: Vec<(i32, i32)> = t.words[0].iter().map(|&l| t.pair_of(l)).collect();
    assert_eq!(pairs, vec![(1, 2), (3, 1), (2, 3)]);
    assert_eq!(t.decode(), p);
    let q = Presentation::new(3, 6, None, vec![vec![1, -2, 3, 1, 2, 3]]).unwrap();
    assert!(hex_to_tri_encode(&q).is_err());
}

#[test]
fn repeated_edge_has_degree_two() {
    let y = glue(&[vec![1, 2, -1, 3]], &[(0, 0, 0, 2)]);
    let e = y.faces()[0].boundary[0].edge;
    assert_eq!(y.edge_degree(e).unwrap(), 2);
    let by_hand = y.faces()[0].boundary.iter().filter(|i| i.edge == e).count();
    assert_eq!(by_hand, 2);
}

fn two_hexagons() -> Complex2 {
    glue(&[vec![1, 2, 3, 4, 5, 6], vec![-3, 7, 8, 9, 10, 11]], &[(0, 2, 1, 0)])
}

#[test]
fn two_hexagon_metrics() {
    let y = two_hexagons();
    assert_eq!(y.edges().len(), 11);
    let deg = y.degrees();
    let gen: i64 = deg.iter().map(|&d| 2 - d as i64).sum();
    let cancel: i64 = deg.iter().map(|&d| d as i64 - 1).sum();
    let m = y.metrics(6).unwrap();
    assert_eq!((m.gen_boundary, m.cancellation, m.deviation), (gen, cancel, Some(6)));
    assert_eq!((gen, cancel), (10, 1));
    assert!(y.parity_check(6).unwrap());
}

#[test]
fn doubled_face_is_a_fold() {
    let y = glue(&[vec![1, 2, 3, 4], vec![1, 2, 3, 4]], &[(0, 0, 1, 0)]);
    let p = Presentation::new(4, 4, Some(0.1), vec![vec![1, 2, 3, 4]]).unwrap();
    assert!(!y.is_fulfilled_by(&p));
    assert_eq!(y.folds(), vec![(0, 1)]);
}

fn hex_strip() -> Complex2 {
    glue(
        &[vec![1, 2, 3, 4, 5, 6], vec![-3, 7, 8, 9, 10, 11], vec![-9, 12, 13, 14, 15, 16]],
        &[(0, 2, 1, 0), (1, 3, 2, 0)],
    )
}

#[test]
fn strip_middle_external_edges() {
    let y = hex_strip();
    let deg = y.degrees();
    let by_hand = y.faces()[1].boundary.iter().filter(|i| deg[i.edge] == 1).count();
    assert_eq!(by_hand, 4);
    assert_eq!(y.external_edge_count(1).unwrap(), 4);
}

/// All face pairs sharing an edge whose attachment words agree, computed from scratch.
fn brute_folds(y: &Complex2) -> Vec<(usize, usize)> {
    let read = |f: usize, i: usize| -> Vec<i32> {
        let b = &y.faces()[f].boundary;
        let k = b.len();
        if b[i].forward {
            (0..k).map(|t| y.letter(b[(i + t) % k])).collect()
        } else {
            (0..k).map(|t| -y.letter(b[(i + k - t) % k])).collect()
        }
    };
    let mut out = BTreeSet::new();
    for f1 in 0..y.face_count() {
        for f2 in f1 + 1..y.face_count() {
            for (i, a) in y.faces()[f1].boundary.iter().enumerate() {
                for (j, b) in y.faces()[f2].boundary.iter().enumerate() {
                    if a.edge == b.edge && read(f1, i) == read(f2, j) {
                        out.insert((f1, f2));
                    }
                }
            }
        }
    }
    out.into_iter().collect()
}

#[test]
fn one_fold_on_a_strip() {
    let mut b = ComplexBuilder::new();
    let ids: Vec<usize> = [vec![1, 2, 3, 4, 5, 6], vec![-3, 7, 8, 9, 10, 11], vec![-3, 7, 8, 9, 10, 11]]
        .iter()
        .map(|w| b.add_polygon(w))
        .collect();
    glue_into(&mut b, &ids, &[(0, 2, 1, 0), (1, 3, 2, 3)]);
    let y = b.build(true).0;
    let p = Presentation::new(11, 6, Some(0.1), vec![vec![1, 2, 3, 4, 5, 6], vec![-3, 7, 8, 9, 10, 11]]).unwrap();
    assert_eq!(brute_folds(&y), vec![(1, 2)]);
    assert_eq!(y.find_reduction_pairs(&p).unwrap(), vec![(1, 2)]);
    assert!(brute_folds(&hex_strip()).is_empty());
}

#[test]
fn local_isoperimetry_examples() {
    let distinct = Presentation::new(6, 6, Some(0.1), vec![vec![1, 2, 3, 4, 5, 6]]).unwrap();
    for eps in [0.0, 0.05, 0.5] {
        assert!(local_isoperimetry_violations(&distinct, 1, eps).unwrap().complexes.is_empty());
    }
    let power = Presentation::new(1, 6, Some(0.05), vec![vec![1; 6]]).unwrap();
    let found = local_isoperimetry_violations(&power, 1, 0.05).unwrap();
    assert!(found.complexes.iter().any(|c| c.face_count() == 1 && c.metrics(6).unwrap().cancellation >= 1));
}

/// Largest cancellation over single-face self-gluings fulfilled by `p`, trying every set
/// partition of the positions into blocks of one generator.
fn brute_one_face_max_cancel(p: &Presentation) -> Option<i64> {
    fn partitions(k: usize, i: usize, blocks: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if i == k {
            out.push(blocks.clone());
            return;
        }
        for b in 0..blocks.len() {
            blocks[b].push(i);
            partitions(k, i + 1, blocks, out);
            blocks[b].pop();
        }
        blocks.push(vec![i]);
        partitions(k, i + 1, blocks, out);
        blocks.pop();
    }
    let k = p.k();
    let mut all = Vec::new();
    partitions(k, 0, &mut Vec::new(), &mut all);
    let mut best = None;
    for r in p.relators() {
        for blocks in &all {
            if blocks.iter().any(|bl| bl.iter().any(|&x| r[x].abs() != r[bl[0]].abs())) {
                continue;
            }
            let mut b = ComplexBuilder::new();
            let f = b.add_polygon(r);
            let mut ok = true;
            for bl in blocks {
                for &z in &bl[1..] {
                    let (a, c) = (b.face_incidence(f, bl[0]), b.face_incidence(f, z));
                    let c = if b.letter(a) == b.letter(c) { c } else { c.reversed() };
                    ok &= b.identify(a, c).is_ok();
                }
            }
            if ok {
                let y = b.build(true).0;
                if y.is_fulfilled_by(p) {
                    let cancel = y.metrics(k).unwrap().cancellation;
                    best = Some(best.map_or(cancel, |m: i64| m.max(cancel)));
                }
            }
        }
    }
    best
}

#[test]
fn single_face_search_matches_brute_force() {
    let cases = [
        vec![vec![1, 2, 1, 2]],
        vec![vec![1, 1, 1, 1]],
        vec![vec![1, 2, -1, -2]],
        vec![vec![1, 2, 1, -2], vec![2, 2, 1, 1]],
    ];
    for rel in cases {
        let p = Presentation::new(2, 4, Some(0.1), rel).unwrap();
        let found = enumerate_fulfilled(&p, 1, SearchBudget::default());
        let max = found.complexes.iter().map(|c| c.metrics(4).unwrap().cancellation).max();
        assert_eq!(max, brute_one_face_max_cancel(&p), "{:?}", p.relators());
    }
}

#[test]
fn cut_of_two_faces_is_the_shared_edge() {
    let y = glue(&[vec![1, 2, 3, 4], vec![-2, 5, 6, 7]], &[(0, 1, 1, 0)]);
    let shared = y.faces()[0].boundary[1].edge;
    let path = cut_path_search(&DiscDiagram::new(y).unwrap()).unwrap();
    assert_eq!(path.iter().map(|i| i.edge).collect::<Vec<_>>(), vec![shared]);
}

fn grid(n: usize) -> Complex2 {
    let cells: Vec<(usize, usize)> = (0..n).flat_map(|r| (0..n).map(move |c| (r, c))).collect();
    let id = |cell| cells.iter().position(|&x| x == cell).unwrap();
    let pairs: Vec<_> = grid_adjacencies(n).iter().map(|&(x, i, z, j)| (id(x), i, id(z), j)).collect();
    glue(&vec![COMMUTATOR.to_vec(); n * n], &pairs)
}

#[test]
fn cut_of_square_grid_runs_through_the_centre() {
    let y = grid(2);
    let deg = y.degrees();
    let mut interior_vertices = HashSet::new();
    for v in 0..y.vertex_count() {
        let touching: Vec<usize> = (0..y.edges().len()).filter(|&e| y.edges()[e].from == v || y.edges()[e].to == v).collect();
        if touching.iter().all(|&e| deg[e] == 2) {
            interior_vertices.insert(v);
        }
    }
    assert_eq!(interior_vertices.len(), 1);
    let d = DiscDiagram::new(y.clone()).unwrap();
    let path = cut_path_search(&d).unwrap();
    assert_eq!(path.len(), 2);
    assert!(interior_vertices.contains(&y.end(path[0])));
}

#[test]
fn easy_cutting_holds_on_discs_and_collars() {
    let y = grid(2);
    let d = DiscDiagram::new(y.clone()).unwrap();
    let gamma = cut_path_search(&d).unwrap();
    let disc = HullDecomposition { disc_basis: (0..4).collect(), hull: vec![], k_const: 2 };
    assert!(verify_easy_cutting(&y, &disc, &gamma, &[]).unwrap().holds);

    let pl = planted_grid(3, Plant::None, 0);
    let y = pl.diagram.complex.clone();
    let basis = vec![1, 8, 5];
    let hull: Vec<usize> = (0..9).filter(|f| !basis.contains(f)).collect();
    let shared = y.faces()[1].boundary[2].edge;
    let gamma = vec![y.faces()[1].boundary[2]];
    assert!(y.faces()[8].boundary.iter().any(|i| i.edge == shared));
    let side: Vec<bool> = hull.iter().map(|&f| !matches!(f, 0 | 2)).collect();
    let h = HullDecomposition { disc_basis: basis, hull, k_const: 36 };
    let rep = verify_easy_cutting(&y, &h, &gamma, &side).unwrap();
    assert!(rep.holds);
    assert_eq!(rep.whole, 12);
}

#[test]
fn two_hexagon_walls_match_union_find() {
    let y = two_hexagons();
    let w = trace_standard_walls(&y, 6).unwrap();
    assert_eq!(w.partition(), &brute_wall_partition(&y, 6)[..]);
    assert_eq!(w.edges().len(), 6);
    assert_eq!(w.component_count(), 5);
    let shared = y.faces()[0].boundary[2].edge;
    assert_eq!(w.component_sizes()[w.component_of(shared)], 2);
}

fn hex_annulus() -> Complex2 {
    glue(&[vec![1, 2, 3, 4, 5, 6], vec![-1, 7, 8, -2, 9, 10]], &[(0, 0, 1, 0), (0, 1, 1, 3)])
}

#[test]
fn hex_annulus_crossing_and_ear() {
    let y = hex_annulus();
    let w = trace_standard_walls(&y, 6).unwrap();
    let brute = brute_wall_partition(&y, 6);
    let b = &y.faces()[0].boundary;
    assert_eq!(brute[b[0].edge], brute[b[1].edge]);
    assert_eq!(classify_faces(&y, &w).crossings(), vec![0]);
    let ear = ear_of_crossing(&y, &w, 0).unwrap();
    assert_eq!(ear.segment.faces(), vec![0, 1, 0]);
}

#[test]
fn square_annulus_intra_ear() {
    let y = glue(&[vec![1, 2, 3, 4], vec![-1, 5, -2, 6]], &[(0, 0, 1, 0), (0, 1, 1, 2)]);
    let w = trace_standard_walls(&y, 4).unwrap();
    assert_eq!(w.partition(), &brute_wall_partition(&y, 4)[..]);
    assert_eq!(classify_faces(&y, &w).crossings(), vec![0]);
    let ear = ear_of_crossing(&y, &w, 0).unwrap();
    assert_eq!(ear.path.len(), 1);
    let (a, b) = ear.ends;
    assert_eq!((a + 4 - b) % 4 % 2, 1, "ends on consecutive edges");
    assert!(matches!(ear_of_crossing(&y, &w, 1), Err(WallError::NotCrossing(1))));
}

#[test]
fn bent_templates() {
    let hex = bent_template(6, 0, 1, (0, 1));
    assert_eq!(hex, vec![(0, 4), (1, 3)]);
    for &(i, j) in &hex {
        let d = (j - i).min(6 - (j - i));
        assert!(d != 1 && d != 3);
        assert!([i, j].iter().filter(|&&x| x == 0 || x == 1).count() == 1);
    }
    let square = bent_template(4, 0, 1, (0, 1));
    assert_eq!(square, vec![(0, 3), (1, 2)]);
}

#[test]
fn closed_strip_wall_cycle() {
    let y = glue(&[vec![1, 2, 3, 4], vec![-2, 5, -4, 6]], &[(0, 1, 1, 0), (0, 3, 1, 2)]);
    let w = trace_standard_walls(&y, 4).unwrap();
    let comp = w.component_of(y.faces()[0].boundary[1].edge);
    let (tree, witness) = wall_is_embedded_tree(&w, comp).unwrap();
    assert!(!tree);
    let Some(TreeWitness::Cycle(cycle)) = witness else { panic!("expected a cycle witness") };
    let mids: HashSet<usize> = cycle.iter().flat_map(|&e| [w.edges()[e].from, w.edges()[e].to]).collect();
    assert_eq!(mids.len(), cycle.len());
}

#[test]
fn bent_wall_through_annulus_is_a_tree() {
    let y = hex_annulus();
    let w = trace_standard_walls(&y, 6).unwrap();
    let bent = build_bent_walls(&y, &w).unwrap();
    let comp = bent.graph.component_of(y.faces()[0].boundary[0].edge);
    assert_eq!(wall_is_embedded_tree(&bent.graph, comp).unwrap(), (true, None));
}

#[test]
fn exchanger_recipe() {
    let r = vec![1, 2, 3, 1, 2, 3];
    assert_eq!(r[0], r[3]);
    let p = Presentation::new(3, 6, Some(0.1), vec![r.clone()]).unwrap();
    let x = find_wall_exchanger(&p).unwrap();
    assert_eq!((x.rotation, x.inverted), (0, false));
    assert_eq!(x.g, r[..3].to_vec());
}

fn walk(s: &str) -> (ClosedWalk, Vec<String>) {
    ClosedWalk::parse(s).unwrap()
}

fn names_of(t: &TreeOfLoops, names: &[String]) -> Vec<String> {
    t.cycles.iter().map(|c| c.iter().map(|&v| names[t.labels[v]].clone()).collect::<Vec<_>>().join(" ")).collect()
}

/// Positions `x < y` holding the same id, plus the whole walk.
fn brute_sub_loops(points: &[usize]) -> BTreeSet<(usize, usize)> {
    let mut out = BTreeSet::from([(0, points.len())]);
    for x in 0..points.len() {
        for y in x + 1..points.len() {
            if points[x] == points[y] {
                out.insert((x, y));
            }
        }
    }
    out
}

#[test]
fn sub_loops_by_position() {
    for s in ["o x m x", "o A B A C B"] {
        let (w, _) = walk(s);
        let found: BTreeSet<(usize, usize)> = find_sub_loops(&w).iter().map(|l| (l.x, l.y)).collect();
        assert_eq!(found, brute_sub_loops(w.points()));
    }
    let (w, _) = walk("o A B A C B");
    assert_eq!(brute_sub_loops(w.points()), BTreeSet::from([(0, 6), (1, 3), (2, 5)]));
}

#[test]
fn removal_leaves_a_bridge() {
    let (w, names) = walk("o x m x");
    let (rest, bridge) = remove_sub_loop(&w, SubLoop { x: 1, y: 3 }).unwrap();
    let kept: Vec<&str> = rest.points().iter().map(|&p| names[p].as_str()).collect();
    assert_eq!(kept, vec!["o", "x"]);
    assert_eq!(names[w.points()[bridge]], "x");
}

#[test]
fn nested_bridge_is_dropped() {
    let (w, _) = walk("o A B B A");
    let t = build_tree_of_loops(&w);
    let bridges: Vec<usize> = t.bridge_history.iter().map(|s| s.bridge).collect();
    assert_eq!(bridges, vec![2, 1]);
    assert!(t.bridge_history[1].removed.x < t.bridge_history[0].bridge);
    assert!(t.bridge_history[0].bridge <= t.bridge_history[1].removed.y);
}

#[test]
fn hand_run_trees() {
    let (w, names) = walk("o x m x");
    let t = build_tree_of_loops(&w);
    assert_eq!(names_of(&t, &names), vec!["x m", "o x"]);
    assert_eq!(t.dual_edges().len(), 1);
    let per: Vec<(String, usize)> =
        cycles_per_vertex(&t).into_iter().map(|(v, c)| (names[t.labels[v]].clone(), c)).collect();
    let mut per = per;
    per.sort();
    assert_eq!(per, vec![("m".into(), 1), ("o".into(), 1), ("x".into(), 2)]);
    let (w, names) = walk("o A B A C B");
    let t = build_tree_of_loops(&w);
    assert_eq!(names_of(&t, &names), vec!["A B", "o A C B"]);
    assert_eq!(t.edge_multiset(), w.edge_multiset());
}
