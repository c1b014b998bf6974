pub mod corpus;
pub mod problem;
pub mod run;
pub mod verify;
