#include <stdio.h>
#include <assert.h>
#include <string.h>
#include "tiebreak.h"

int main(void) {
    TbGame *game = tb_game_indifference();
    assert(tb_game_num_players(game) == 2);

    TbSolveResult *result = NULL;
    TbStatus status = tb_solve(game, NULL, &result);
    assert(status == TB_STATUS_INDIFFERENCE);
    printf("generic solve: %s\n", tb_last_error());

    status = tb_solve(game, "profile:1=F,2=F", &result);
    assert(status == TB_STATUS_OK);
    char *value = tb_result_value(result);
    char *path = tb_result_path(result);
    printf("all-friendly value: %s via %s, ties: %zu\n", value, path, tb_result_tie_count(result));
    assert(strcmp(value, "1 1") == 0);
    tb_string_free(value);
    tb_string_free(path);
    tb_result_free(result);

    char *nash = NULL;
    assert(tb_report(game, TB_REPORT_NASH, &nash) == TB_STATUS_OK);
    printf("%s", nash);
    tb_string_free(nash);
    tb_game_free(game);
    return 0;
}
