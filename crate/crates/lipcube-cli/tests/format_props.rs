//! Round-trip invariants of the file formats over random contents.

use proptest::prelude::*;
use std::io::Write;

use lipcube::cube::{BooleanFunction, Point, TruthTable};
use lipcube::mappings::Mapping;
use lipcube_cli::formats::{
    read_mapping, read_truth_table, render_mapping, render_truth_table,
};

fn read_back_table(text: &str) -> BooleanFunction {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    read_truth_table(f.path()).unwrap()
}

proptest! {
    #[test]
    fn truth_table_round_trips_in_both_bodies(
        (n, bits) in (1u32..=8).prop_flat_map(|n| {
            (Just(n), proptest::collection::vec(any::<bool>(), 1usize << n))
        }),
        hex in any::<bool>(),
    ) {
        let table = TruthTable::from_bits(n, bits.iter().copied());
        let f = BooleanFunction::from_table(table);
        let text = render_truth_table(&f, hex);
        let back = read_back_table(&text);
        prop_assert_eq!(back.dim(), n);
        for (i, &bit) in bits.iter().enumerate() {
            prop_assert_eq!(back.eval(Point::new(i as u64, n)), bit);
        }
        // rendering the reread function reproduces the file exactly
        prop_assert_eq!(render_truth_table(&back, hex), text);
    }

    #[test]
    fn mapping_files_round_trip(
        (n, table) in (1u32..=7).prop_flat_map(|n| {
            (Just(n), Just((0..1u64 << n).collect::<Vec<u64>>()).prop_shuffle())
        }),
    ) {
        let m = Mapping::from_table("perm".into(), n, table).unwrap();
        let text = render_mapping(&m);
        let mut file = tempfile::NamedTempFile::new().unwrap();
        file.write_all(text.as_bytes()).unwrap();
        let back = read_mapping(file.path(), "back").unwrap();
        prop_assert_eq!(back.table().unwrap(), m.table().unwrap());
        prop_assert_eq!(render_mapping(&back), text);
    }
}
