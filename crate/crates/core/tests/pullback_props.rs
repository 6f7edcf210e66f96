use freeprod::agraph::{AGraph, Dart};
use freeprod::fold::build_from_generators;
use freeprod::instance::{generate, InstanceSpec};
use freeprod::pullback::{intersection_with_base, pullback};
use freeprod::word::Word;

fn instances(
    seed: u64,
    overlap: bool,
    n: u64,
) -> impl Iterator<Item = ([Vec<Word>; 2], [AGraph; 2])> {
    let spec = InstanceSpec {
        seed,
        overlap,
        max_gens: 3,
        max_syllables: 6,
        ..Default::default()
    };
    (0..n).map(move |i| {
        let inst = generate(&spec, i).unwrap();
        (inst.gens, inst.graphs)
    })
}

#[test]
fn components_are_conjugate_intersections() {
    // Each component is the core of H1 ∩ sH2s⁻¹ for its representative s.
    let mut nontrivial = 0;
    for (gens, [g1, g2]) in instances(5, true, 60) {
        let p = pullback(&g1, &g2);
        for c in p.components(&g1, &g2) {
            let s = &c.representative;
            let conj: Vec<Word> = gens[1].iter().map(|w| w.conjugate_by(s)).collect();
            let meet = intersection_with_base(&g1, &build_from_generators(&conj).unwrap());
            assert_eq!(
                meet.core().unbased_canonical_form(),
                c.graph.unbased_canonical_form()
            );
            nontrivial += 1;
        }
    }
    assert!(nontrivial > 30);
}

#[test]
fn total_rank_is_symmetric() {
    for (_, [g1, g2]) in instances(6, true, 60) {
        let (a, b) = (pullback(&g1, &g2), pullback(&g2, &g1));
        assert_eq!(a.total_rank(), b.total_rank());
        assert_eq!(
            a.graph.unbased_canonical_form().len(),
            b.graph.unbased_canonical_form().len()
        );
    }
}

#[test]
fn projections_preserve_path_labels() {
    for (_, [g1, g2]) in instances(7, true, 40) {
        let p = pullback(&g1, &g2);
        let g = &p.graph;
        let Some(start) = g.primary_vertices().next() else {
            continue;
        };
        // Walk a deterministic reduced path, always taking the last admissible dart.
        let mut path: Vec<Dart> = Vec::new();
        let mut v = start;
        for _ in 0..12 {
            let next = g
                .darts_at(v)
                .iter()
                .rev()
                .find(|&&d| path.last().is_none_or(|l| d != l.inverse()));
            let Some(&d) = next else { break };
            path.push(d);
            v = g.head(d);
        }
        let word = g.path_word(&path);
        for (i, h) in [&g1, &g2].into_iter().enumerate() {
            let image: Vec<Dart> = path.iter().map(|&d| p.proj[i].dart(d)).collect();
            assert!(h.is_reduced_path(&image));
            assert_eq!(h.path_word(&image), word);
        }
    }
}

#[test]
fn intersection_contains_common_elements() {
    for (gens, [g1, g2]) in instances(8, true, 40) {
        let meet = intersection_with_base(&g1, &g2);
        for w in &gens[1] {
            assert_eq!(meet.membership(w), g1.membership(w));
        }
        for w in meet.basis() {
            assert!(g1.membership(&w) && g2.membership(&w));
        }
    }
}
