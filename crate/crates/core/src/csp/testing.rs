use crate::catalog::{parse_catalog, Catalog};

pub(crate) fn mini() -> Catalog {
    parse_catalog(include_str!("../../data/mini.catalog.yaml")).unwrap()
}

pub(crate) fn target_following() -> Catalog {
    parse_catalog(include_str!("../../data/target_following.catalog.yaml")).unwrap()
}

pub(crate) fn aerial() -> Catalog {
    parse_catalog(include_str!("../../data/aerial.catalog.yaml")).unwrap()
}
