pub mod error;
pub mod exactla;
pub mod quiver;
pub mod shrunk;
pub mod disc;
pub mod hn;
pub mod oracles;
pub mod gen;
pub mod kempf;
pub mod cli;
