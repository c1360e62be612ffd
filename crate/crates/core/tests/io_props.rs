mod common;

use modal_workbench::io::{model_to_json, parse_model, WorldNames};
use proptest::prelude::*;

proptest! {
    #[test]
    fn models_round_trip_through_json(m in common::model(4)) {
        let names = WorldNames::numeric(m.frame().size());
        let text = model_to_json(&m, &names).to_string();
        let back = parse_model(&text).unwrap();
        prop_assert_eq!(back.model.frame(), m.frame());
        for p in common::ATOMS {
            prop_assert_eq!(back.model.value(p), m.value(p));
        }
        prop_assert_eq!(model_to_json(&back.model, &back.names), model_to_json(&m, &names));
    }
}
