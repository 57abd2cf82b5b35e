pub mod order4;
