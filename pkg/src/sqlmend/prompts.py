"""Prompt templates: the bug-generation request sent to the assisting LLM and
the fix-request prompt that becomes a training sample's input text.

Both are rendered by plain placeholder substitution so two calls with equal
inputs produce byte-identical prompts. The "Response:" trailer of the fix
prompt is part of the input text (the model's completion starts after it).
"""

from __future__ import annotations

from typing import Optional, Sequence

BUG_GENERATION_TEMPLATE = """\
Based on the SCHEMAS and TARGET SQL, help to generate the error sql which are related to SCHEMAS and similar to TARGET SQL. The generated error sql should contain error related to ERROR INFO. You should obey the following RULES.

RULES
1. If the SCHEMAS are empty, it means the TARGET SPARK SQL is not related to any schemas.
2. ERROR INFO should not be appeared in explanation.
3. Except for error part of code, other parts of code should be same between correct sql and error sql.
4. Comments and indents in generated error sql and correct sql should be the same.
5. If it is hard to generate error sql which is similar to the TARGET SQL related to ERROR INFO, please return no in suitable field, otherwise it should be yes.

Below is a brief example which you can refer to (if the slots of example is empty please ignore Example section):

[EXAMPLE]

target sql:

TARGET_SQL_EXAMPLE_PLACEHOLDER

error info:

ERROR_INFO_EXAMPLE_PLACEHOLDER

error sql:

ERROR_SQL_EXAMPLE_PLACEHOLDER

Now give you the tables schema, corresponding target SQL and error type information as below.

Please write a error SQL that match the error type information.

[SCHEMAS]

SCHEMAS_PLACEHOLDER

[TARGET SPARK SQL]

TARGET_SPARK_SQL_PLACEHOLDER

[ERROR INFO]

ERROR_INFO_PLACEHOLDER

RESPONSE REQUIREMENT

Return json str which can be parsed by json.loads() of python3 as following:

{"error sql": "", "correct sql": "", "reason": "", "suitable": ""}"""

FIX_REQUEST_TEMPLATE = """\
Requirements: Directly generate the right SQL.

[TABLES SCHEMA]

TABLES_SCHEMA_PLACEHOLDER

[BUG SQL]

BUG_SQL_PLACEHOLDER

[ERROR MESSAGE]

ERROR_MESSAGE_PLACEHOLDER

Question: BUGFIX task

Based on the error SQL code, error messages, and input table schema, please fix the bugs and write the corresponding correct SQL code. Remember not to change any existing comments and SQL code without errors.

Response:"""


def render_bug_generation_prompt(
    schema_ddl: Sequence[str],
    target_sql: str,
    error_info: str,
    example: Optional[tuple[str, str, str]] = None,
) -> str:
    """Fill the bug-generation template.

    ``example`` is (target sql, error info, error sql); when absent the example
    slots are left empty — the template itself tells the model to ignore an
    empty Example section.
    """
    ex_target, ex_info, ex_error = example if example is not None else ("", "", "")
    prompt = BUG_GENERATION_TEMPLATE
    prompt = prompt.replace("TARGET_SQL_EXAMPLE_PLACEHOLDER", ex_target)
    prompt = prompt.replace("ERROR_INFO_EXAMPLE_PLACEHOLDER", ex_info)
    prompt = prompt.replace("ERROR_SQL_EXAMPLE_PLACEHOLDER", ex_error)
    prompt = prompt.replace("SCHEMAS_PLACEHOLDER", "\n".join(schema_ddl))
    prompt = prompt.replace("TARGET_SPARK_SQL_PLACEHOLDER", target_sql)
    prompt = prompt.replace("ERROR_INFO_PLACEHOLDER", error_info)
    return prompt


def render_fix_prompt(schema_ddl: Sequence[str], bug_sql: str, error_message: str) -> str:
    """Fill the fix-request template that trainers use as sample input text."""
    prompt = FIX_REQUEST_TEMPLATE
    prompt = prompt.replace("TABLES_SCHEMA_PLACEHOLDER", "\n".join(schema_ddl))
    prompt = prompt.replace("BUG_SQL_PLACEHOLDER", bug_sql)
    prompt = prompt.replace("ERROR_MESSAGE_PLACEHOLDER", error_message)
    return prompt
