//! Prints the built-in tile set as TOML. Regenerate the bundled data file
//! after editing the tile definitions:
//!
//! ```text
//! cargo run -p wayfarer-core --example export_tileset > assets/tileset.toml
//! ```

fn main() {
    print!("{}", wayfarer_core::wfcgen::default_tileset().to_toml());
}
