from .worked_examples import (
    EXAMPLES,
    Constraint,
    ExampleCase,
    ExampleRun,
    closed_form_potential,
    default_params,
    example,
    example_ids,
    expected_verdict,
    load_fixtures,
    seed_potential,
)
