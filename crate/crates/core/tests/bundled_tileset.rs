//! Pins the bundled tileset file to the built-in definitions. When the
//! definitions change, regenerate the file with the export_tileset example.

use wayfarer_core::wfcgen::{default_tileset, TileSet};

#[test]
fn bundled_file_matches_builtin_tileset() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../assets/tileset.toml");
    let text = std::fs::read_to_string(path).expect("read assets/tileset.toml");
    assert_eq!(
        text,
        default_tileset().to_toml(),
        "assets/tileset.toml is stale; regenerate it with the export_tileset example"
    );

    let parsed = TileSet::from_toml(&text).expect("bundled tileset parses");
    parsed.validate().expect("bundled tileset is valid");
    let builtin = default_tileset();
    assert_eq!(parsed.tiles, builtin.tiles);
    assert_eq!(parsed.compat_pairs(), builtin.compat_pairs());
}
