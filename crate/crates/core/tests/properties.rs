mod common;

use blockgraph::{build, deserialize, lz, serialize, stats, BlockKind, BpString, BuildConfig, NodeHandle};
use proptest::prelude::*;

fn text_strategy() -> impl Strategy<Value = Vec<u8>> {
    prop_oneof![
        prop::collection::vec(prop::sample::select(b"ab".to_vec()), 1..300),
        prop::collection::vec(prop::sample::select(b"acgt".to_vec()), 1..300),
        (prop::collection::vec(prop::sample::select(b"xyz".to_vec()), 1..12), 1usize..30)
            .prop_map(|(base, k)| base.repeat(k)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn lz_round_trip(text in text_strategy()) {
        let parse = lz::parse(&text).unwrap();
        prop_assert_eq!(parse.decode().unwrap(), text.clone());
        let covered: usize = parse.phrases.iter().map(|p| p.span()).sum();
        prop_assert_eq!(covered, text.len());
    }

    #[test]
    fn queries_match_oracles(text in text_strategy(), arity in 2usize..9, seed in any::<u64>()) {
        let g = build(&text, &common::config(&text, arity, seed)).unwrap();
        prop_assert_eq!(common::check_all(&g, &text, 200), Ok(()));
    }

    #[test]
    fn structure_invariants(text in text_strategy(), arity in 2usize..9, skip in any::<bool>()) {
        let cfg = BuildConfig { arity, level_skip: skip, ..common::config(&text, arity, 0) };
        let g = build(&text, &cfg).unwrap();
        let levels = g.levels();
        let top_len: usize = levels[0].iter().map(|b| b.len).sum();
        prop_assert_eq!(top_len, text.len());
        for (l, level) in levels.iter().enumerate() {
            for (i, b) in level.iter().enumerate() {
                prop_assert!(b.len > 0);
                if i > 0 {
                    prop_assert!(level[i - 1].start < b.start);
                }
                for (k, &a) in g.params().tracked.iter().enumerate() {
                    prop_assert_eq!(b.rank_before[k], common::rank(&text, a, b.start));
                }
                match &b.kind {
                    BlockKind::Back(bp) => {
                        let target = &level[bp.target];
                        prop_assert!(target.is_marked() && bp.target < i);
                        let src = target.start + bp.offset;
                        prop_assert!(src < b.start);
                        prop_assert_eq!(&text[src..src + b.len], &text[b.start..b.end()]);
                        if let Some(t2) = bp.second_target() {
                            prop_assert!(level[t2].is_marked() && level[t2].start == target.end());
                        }
                    }
                    BlockKind::Internal { first_child, child_count } => {
                        let kids = &levels[l + 1][*first_child..first_child + child_count];
                        prop_assert_eq!(kids[0].start, b.start);
                        prop_assert_eq!(kids.iter().map(|c| c.len).sum::<usize>(), b.len);
                        prop_assert!(kids.windows(2).all(|w| w[0].len >= w[1].len));
                    }
                    BlockKind::Literal(bytes) => prop_assert_eq!(&bytes[..], &text[b.start..b.end()]),
                }
            }
        }
    }

    #[test]
    fn serialization_round_trip(text in text_strategy(), arity in 2usize..9) {
        let g = build(&text, &common::config(&text, arity, 1)).unwrap();
        let bytes = serialize(&g);
        prop_assert_eq!(stats(&g).total_bytes, bytes.len());
        let h = deserialize(&bytes).unwrap();
        prop_assert_eq!(serialize(&h), bytes);
        prop_assert_eq!(h, g);
    }

    #[test]
    fn excess_and_lca(nodes in 1usize..400, seed in any::<u64>(), arity in 2usize..9) {
        let text = blockgraph::corpus::bp_random_tree(nodes, seed).unwrap();
        let bp = BpString::new(&text, &BuildConfig { arity, ..BuildConfig::default() }).unwrap();
        let n = text.len();
        for i in (1..=n).step_by(7) {
            for k in (i..=n).step_by(13) {
                prop_assert_eq!(bp.min_excess_pos(i, k).unwrap(), common::min_excess_pos(&text, i, k));
            }
        }
        let parent = common::parents(&text);
        let opens: Vec<usize> = (1..=n).filter(|&p| text[p - 1] == b'(').collect();
        for (x, &u) in opens.iter().enumerate().step_by(5) {
            for &v in opens.iter().skip(x % 3).step_by(11) {
                prop_assert_eq!(bp.lca(NodeHandle(u), NodeHandle(v)).unwrap().0, common::lca(&parent, u, v));
            }
        }
    }
}

#[test]
fn bp_strings_round_trip_through_files() {
    let text = blockgraph::corpus::bp_random_tree(300, 3).unwrap();
    let bp = BpString::new(&text, &BuildConfig::default()).unwrap();
    let again = BpString::from_graph(deserialize(&serialize(bp.graph())).unwrap()).unwrap();
    for i in 1..=text.len() {
        assert_eq!(again.excess(i).unwrap(), bp.excess(i).unwrap());
    }
}
