use blockgraph::{build, corpus, deserialize, serialize, BuildConfig, Error};

fn sample() -> Vec<u8> {
    serialize(&build(&corpus::fibonacci(500).unwrap(), &BuildConfig::default()).unwrap())
}

#[test]
fn single_node_graph_reserializes_identically() {
    let bytes = serialize(&build(b"ab", &BuildConfig::default()).unwrap());
    assert_eq!(serialize(&deserialize(&bytes).unwrap()), bytes);
    assert_eq!(&bytes[..4], b"BGF1");
}

#[test]
fn each_corruption_has_its_error() {
    let bytes = sample();
    assert_eq!(deserialize(b""), Err(Error::BadMagic));
    assert_eq!(deserialize(b"BGF2rest"), Err(Error::BadMagic));

    let mut v = bytes.clone();
    v[4..6].copy_from_slice(&7u16.to_le_bytes());
    assert_eq!(deserialize(&v), Err(Error::Version(7)));

    for cut in [5, 13, bytes.len() / 2, bytes.len() - 1] {
        assert_eq!(deserialize(&bytes[..cut]), Err(Error::Truncated), "cut at {cut}");
    }

    for pos in [14, 30, bytes.len() / 2, bytes.len() - 9, bytes.len() - 1] {
        let mut c = bytes.clone();
        c[pos] ^= 0x5a;
        assert!(matches!(deserialize(&c), Err(Error::Checksum { .. })), "flip at {pos}");
    }
}

#[test]
fn trailing_garbage_is_malformed() {
    let mut bytes = sample();
    bytes.push(0);
    assert!(matches!(deserialize(&bytes), Err(Error::Malformed(_))));
}
