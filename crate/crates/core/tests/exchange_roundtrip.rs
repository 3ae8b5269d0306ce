use archlib_core::exchange::{parse_model, serialize_model, ModelDocument};
use archlib_testkit::models::arb_model;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn parse_inverts_serialize(doc in arb_model(200)) {
        let bytes = serialize_model(&doc).unwrap();
        let back: ModelDocument = parse_model(&bytes).unwrap();
        prop_assert_eq!(&back, &doc);
        prop_assert_eq!(serialize_model(&back).unwrap(), bytes);
    }

    #[test]
    fn parser_never_panics(bytes in proptest::collection::vec(any::<u8>(), 0..512)) {
        let _ = parse_model(&bytes);
    }

    #[test]
    fn truncated_documents_are_rejected_cleanly(doc in arb_model(20), cut in any::<prop::sample::Index>()) {
        let bytes = serialize_model(&doc).unwrap();
        let cut = cut.index(bytes.len());
        let _ = parse_model(&bytes[..cut]);
    }
}
