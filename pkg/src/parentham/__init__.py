"""Parent Hamiltonians for prescribed ground spaces."""
