# JSON document schemas
